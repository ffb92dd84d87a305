from pathlib import Path

import pytest

from pairfuzz.corpus import ApiEntry, ArgSpec, load_corpus
from pairfuzz.values import ValueRepr

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def mini_corpus_path() -> Path:
    return FIXTURES / "mini_corpus.json"


@pytest.fixture()
def mini_db(mini_corpus_path):
    return load_corpus(mini_corpus_path)


def entry(name: str, arg_specs=(), description: str = "", code_blocks=()) -> ApiEntry:
    """Shorthand ApiEntry builder: arg_specs as (name, types, optional, default)."""
    args = []
    for pos, spec in enumerate(arg_specs):
        arg_name, types, *rest = spec
        optional = rest[0] if rest else False
        default = rest[1] if len(rest) > 1 else None
        args.append(
            ArgSpec(
                name=arg_name,
                position=pos,
                optional=optional,
                default=default,
                observed_types=frozenset(types),
            )
        )
    return ApiEntry(
        qualified_name=name,
        args=tuple(args),
        description=description,
        code_blocks=tuple(code_blocks),
    )
