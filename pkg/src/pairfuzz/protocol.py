"""Executor wire protocol and process supervision.

Executors are subprocesses speaking newline-delimited JSON over stdio: one
request line in, exactly one response line out, nothing else on stdout.  On
startup the executor emits ``{"ready":true,"protocol":1}``.  Logs and the
side-progress marks used for crash attribution go to stderr.

The in-process :class:`MockExecutor` replays scripted outcomes keyed by
(api, input-hash) so the whole orchestrator test suite runs without any
real executor.
"""

from __future__ import annotations

import enum
import json
import logging
import shlex
import subprocess
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from queue import Empty, Queue
from typing import Any

from .values import ValueRepr, canonical_json, values_hash

log = logging.getLogger(__name__)

PROTOCOL_VERSION = 1
DEFAULT_TIMEOUT_MS = 5000


class InfrastructureError(Exception):
    """The executor cannot be launched or kept alive; the campaign halts."""


class UnscriptedRequest(Exception):
    """A mock executor received a request its script does not cover."""


class Status(str, enum.Enum):
    """Coarse execution status of one API invocation."""

    SUCCESS = "success"
    EXCEPTION = "exception"
    CRASH = "crash"

    def __str__(self) -> str:  # keep report serialization compact
        return self.value


@dataclass(frozen=True)
class Tolerance:
    """Float comparison bounds: equal when |x-y| <= atol + rtol*|y|."""

    rtol: float = 1e-3
    atol: float = 1e-6


@dataclass(frozen=True)
class PairedRequest:
    """Run source then target in one executor process and compare."""

    id: int
    source_api: str
    source_positional: tuple[ValueRepr, ...]
    source_keyword: tuple[tuple[str, ValueRepr], ...]
    target_api: str
    target_positional: tuple[ValueRepr, ...]
    target_keyword: tuple[tuple[str, ValueRepr], ...]
    tolerance: Tolerance = Tolerance()
    timeout_ms: int = DEFAULT_TIMEOUT_MS

    def to_obj(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "source": {
                "api": self.source_api,
                "positional": [v.to_obj() for v in self.source_positional],
                "keyword": {k: v.to_obj() for k, v in self.source_keyword},
            },
            "target": {
                "api": self.target_api,
                "positional": [v.to_obj() for v in self.target_positional],
                "keyword": {k: v.to_obj() for k, v in self.target_keyword},
            },
            "tolerance": {"rtol": self.tolerance.rtol, "atol": self.tolerance.atol},
            "timeout_ms": self.timeout_ms,
        }

    @staticmethod
    def from_obj(obj: dict[str, Any]) -> "PairedRequest":
        tol = obj.get("tolerance", {})
        return PairedRequest(
            id=int(obj["id"]),
            source_api=obj["source"]["api"],
            source_positional=tuple(ValueRepr.from_obj(v) for v in obj["source"].get("positional", [])),
            source_keyword=tuple(sorted(
                (k, ValueRepr.from_obj(v)) for k, v in obj["source"].get("keyword", {}).items()
            )),
            target_api=obj["target"]["api"],
            target_positional=tuple(ValueRepr.from_obj(v) for v in obj["target"].get("positional", [])),
            target_keyword=tuple(sorted(
                (k, ValueRepr.from_obj(v)) for k, v in obj["target"].get("keyword", {}).items()
            )),
            tolerance=Tolerance(float(tol.get("rtol", 1e-3)), float(tol.get("atol", 1e-6))),
            timeout_ms=int(obj.get("timeout_ms", DEFAULT_TIMEOUT_MS)),
        )

    def source_hash(self) -> str:
        return values_hash(list(self.source_positional), dict(self.source_keyword))

    def target_hash(self) -> str:
        return values_hash(list(self.target_positional), dict(self.target_keyword))


@dataclass(frozen=True)
class PairedResponse:
    id: int
    status_s: Status
    status_t: Status
    value_equal: bool | None = None  # present iff both statuses are success
    exception_class_s: str | None = None
    exception_class_t: str | None = None
    value_summary_s: dict | None = None
    value_summary_t: dict | None = None
    crash_tag_s: str | None = None
    crash_tag_t: str | None = None

    def __post_init__(self) -> None:
        both_success = self.status_s is Status.SUCCESS and self.status_t is Status.SUCCESS
        if both_success != (self.value_equal is not None):
            raise ValueError("value_equal must be present iff both statuses are success")

    def to_obj(self) -> dict[str, Any]:
        obj: dict[str, Any] = {
            "id": self.id,
            "status_s": self.status_s.value,
            "status_t": self.status_t.value,
        }
        for name in (
            "value_equal",
            "exception_class_s",
            "exception_class_t",
            "value_summary_s",
            "value_summary_t",
            "crash_tag_s",
            "crash_tag_t",
        ):
            v = getattr(self, name)
            if v is not None:
                obj[name] = v
        return obj

    @staticmethod
    def from_obj(obj: dict[str, Any]) -> "PairedResponse":
        return PairedResponse(
            id=int(obj["id"]),
            status_s=Status(obj["status_s"]),
            status_t=Status(obj["status_t"]),
            value_equal=obj.get("value_equal"),
            exception_class_s=obj.get("exception_class_s"),
            exception_class_t=obj.get("exception_class_t"),
            value_summary_s=obj.get("value_summary_s"),
            value_summary_t=obj.get("value_summary_t"),
            crash_tag_s=obj.get("crash_tag_s"),
            crash_tag_t=obj.get("crash_tag_t"),
        )


def _crash_response(req: PairedRequest, tag: str, mark: dict | None) -> PairedResponse:
    """Synthesize the response for an executor that died mid-request.

    Execution order is source-then-target, so a recorded source-done mark
    attributes the crash to the target side; otherwise the source crashed
    and the target was never reached.
    """
    if mark is not None:
        status_s = Status(mark.get("status", "success"))
        return PairedResponse(
            id=req.id,
            status_s=status_s,
            status_t=Status.CRASH,
            exception_class_s=mark.get("exception_class"),
            crash_tag_t=tag,
        )
    return PairedResponse(
        id=req.id,
        status_s=Status.CRASH,
        status_t=Status.CRASH,
        crash_tag_s=tag,
        crash_tag_t="not-executed" if tag != "timeout" else "timeout",
    )


class ExecutorClient:
    """Supervises one executor subprocess: timeouts, crash detection, restart."""

    def __init__(
        self,
        cmd: str,
        *,
        timeout_ms: int = DEFAULT_TIMEOUT_MS,
        max_restarts: int = 10,
        handshake_timeout_s: float = 30.0,
    ):
        self.cmd = cmd
        self.timeout_ms = timeout_ms
        self.max_restarts = max_restarts
        self.handshake_timeout_s = handshake_timeout_s
        self.restarts = 0
        self._proc: subprocess.Popen | None = None
        self._lines: Queue = Queue()
        self._marks: dict[int, dict] = {}
        self._lock = threading.Lock()

    # -- process lifecycle ---------------------------------------------------

    def start(self) -> None:
        if self._proc is not None and self._proc.poll() is None:
            return
        try:
            self._proc = subprocess.Popen(
                shlex.split(self.cmd),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as e:
            raise InfrastructureError(f"cannot launch executor {self.cmd!r}: {e}") from e
        self._lines = Queue()
        self._marks = {}
        threading.Thread(target=self._read_stdout, args=(self._proc,), daemon=True).start()
        threading.Thread(target=self._read_stderr, args=(self._proc,), daemon=True).start()
        self._handshake()

    def _read_stdout(self, proc: subprocess.Popen) -> None:
        assert proc.stdout is not None
        for line in proc.stdout:
            self._lines.put(line)
        self._lines.put(None)  # EOF sentinel

    def _read_stderr(self, proc: subprocess.Popen) -> None:
        assert proc.stderr is not None
        for line in proc.stderr:
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError:
                log.debug("executor: %s", line)
                continue
            if isinstance(obj, dict) and obj.get("mark") == "source_done":
                with self._lock:
                    self._marks[int(obj.get("id", -1))] = obj
            else:
                log.debug("executor: %s", line)

    def _handshake(self) -> None:
        try:
            line = self._lines.get(timeout=self.handshake_timeout_s)
        except Empty:
            raise InfrastructureError("executor did not emit a handshake") from None
        if line is None:
            raise InfrastructureError("executor exited before handshake")
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise InfrastructureError(f"bad handshake line {line!r}") from e
        if not obj.get("ready") or obj.get("protocol") != PROTOCOL_VERSION:
            raise InfrastructureError(f"unsupported executor handshake {obj!r}")

    def _restart(self) -> None:
        self.kill()
        self.restarts += 1
        if self.restarts > self.max_restarts:
            raise InfrastructureError(
                f"executor restart budget ({self.max_restarts}) exhausted"
            )
        self.start()

    def kill(self) -> None:
        if self._proc is not None and self._proc.poll() is None:
            self._proc.kill()
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                pass

    def close(self) -> None:
        if self._proc is not None and self._proc.poll() is None:
            try:
                assert self._proc.stdin is not None
                self._proc.stdin.close()
            except OSError:
                pass
            try:
                self._proc.wait(timeout=2)
            except subprocess.TimeoutExpired:
                self.kill()

    def _death_tag(self) -> str:
        if self._proc is None:
            return "exit"
        rc = self._proc.poll()
        if rc is None:
            try:
                rc = self._proc.wait(timeout=2)
            except subprocess.TimeoutExpired:
                return "exit"
        if rc is not None and rc < 0:
            return f"signal:{-rc}"
        return f"exit:{rc}"

    # -- requests --------------------------------------------------------

    def call_paired(self, req: PairedRequest) -> PairedResponse:
        if self._proc is None:
            self.start()
        assert self._proc is not None
        with self._lock:
            self._marks.pop(req.id, None)
        line = canonical_json(req.to_obj())
        try:
            assert self._proc.stdin is not None
            self._proc.stdin.write(line + "\n")
            self._proc.stdin.flush()
        except (OSError, ValueError):
            return self._synthesize_and_restart(req, self._death_tag())

        deadline = max(req.timeout_ms, 1) / 1000.0 + 2.0
        try:
            out = self._lines.get(timeout=deadline)
        except Empty:
            self.kill()
            return self._synthesize_and_restart(req, "timeout")
        if out is None:
            return self._synthesize_and_restart(req, self._death_tag())
        try:
            resp = PairedResponse.from_obj(json.loads(out))
            if resp.id != req.id:
                raise ValueError(f"response id {resp.id} for request {req.id}")
        except (ValueError, KeyError, json.JSONDecodeError) as e:
            log.warning("garbled executor response (%s); restarting", e)
            self.kill()
            return self._synthesize_and_restart(req, "protocol-error")
        return resp

    def _synthesize_and_restart(self, req: PairedRequest, tag: str) -> PairedResponse:
        with self._lock:
            mark = self._marks.get(req.id)
        resp = _crash_response(req, tag, mark)
        self._restart()
        return resp


# ---------------------------------------------------------------------------
# Scriptable in-process executor
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScriptedOutcome:
    """Behavior of one API on one (or any) input."""

    status: Status = Status.SUCCESS
    value: str | None = "=input"  # opaque value token; "=input" means the input hash
    exception_class: str | None = None
    summary: dict | None = None


class MockExecutor:
    """Deterministic in-process stand-in for a real executor.

    Outcomes are looked up per side under key (api, input_hash), then
    (api, None), then the default outcome.  A missing outcome raises
    UnscriptedRequest, which is a test failure by design.  `die_on_requests`
    simulates an executor death (during the target side) on the given
    1-based request indices; like the real client, the mock synthesizes a
    crash response and keeps serving subsequent requests.
    """

    def __init__(
        self,
        script: dict[tuple[str, str | None], ScriptedOutcome] | None = None,
        *,
        default: ScriptedOutcome | None = None,
        die_on_requests: set[int] | None = None,
    ):
        self.script = dict(script or {})
        self.default = default
        self.die_on_requests = set(die_on_requests or ())
        self.requests_served = 0
        self.restarts = 0

    @classmethod
    def from_script_file(cls, path: str | Path) -> "MockExecutor":
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
        script: dict[tuple[str, str | None], ScriptedOutcome] = {}
        for rule in obj.get("rules", []):
            key = (rule["api"], rule.get("input_hash"))
            script[key] = ScriptedOutcome(
                status=Status(rule.get("status", "success")),
                value=rule.get("value", "=input"),
                exception_class=rule.get("exception_class"),
                summary=rule.get("summary"),
            )
        default = None
        if "default" in obj:
            d = obj["default"]
            default = ScriptedOutcome(
                status=Status(d.get("status", "success")),
                value=d.get("value", "=input"),
                exception_class=d.get("exception_class"),
                summary=d.get("summary"),
            )
        return cls(
            script,
            default=default,
            die_on_requests=set(obj.get("die_on_requests", [])),
        )

    def _outcome(self, api: str, input_hash: str) -> ScriptedOutcome:
        for key in ((api, input_hash), (api, None)):
            if key in self.script:
                return self.script[key]
        if self.default is not None:
            return self.default
        raise UnscriptedRequest(f"no scripted outcome for {api} on input {input_hash[:12]}")

    def _token(self, outcome: ScriptedOutcome, input_hash: str) -> str | None:
        if outcome.value == "=input":
            return input_hash
        return outcome.value

    def call_paired(self, req: PairedRequest) -> PairedResponse:
        self.requests_served += 1
        src_hash = req.source_hash()
        out_s = self._outcome(req.source_api, src_hash)

        if self.requests_served in self.die_on_requests:
            self.restarts += 1
            mark = None
            if out_s.status is not Status.CRASH:
                mark = {"status": out_s.status.value, "exception_class": out_s.exception_class}
            return _crash_response(req, "exit:1", mark)

        tgt_hash = req.target_hash()
        out_t = self._outcome(req.target_api, tgt_hash)
        status_s, status_t = out_s.status, out_t.status
        value_equal = None
        if status_s is Status.SUCCESS and status_t is Status.SUCCESS:
            value_equal = self._token(out_s, src_hash) == self._token(out_t, tgt_hash)
        return PairedResponse(
            id=req.id,
            status_s=status_s,
            status_t=status_t,
            value_equal=value_equal,
            exception_class_s=out_s.exception_class if status_s is Status.EXCEPTION else None,
            exception_class_t=out_t.exception_class if status_t is Status.EXCEPTION else None,
            value_summary_s=out_s.summary,
            value_summary_t=out_t.summary,
        )

    def close(self) -> None:  # interface parity with ExecutorClient
        pass


class ReplayExecutor:
    """Replays frozen request/response transcript entries exactly."""

    def __init__(self, entries: list[tuple[dict, dict]]):
        self._by_request = {
            self._key(req_obj): resp_obj for req_obj, resp_obj in entries
        }

    @staticmethod
    def _key(req_obj: dict) -> str:
        stripped = {k: v for k, v in req_obj.items() if k != "id"}
        return canonical_json(stripped)

    @classmethod
    def from_transcript(cls, path: str | Path) -> "ReplayExecutor":
        entries = []
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            obj = json.loads(line)
            entries.append((obj["request"], obj["response"]))
        return cls(entries)

    def call_paired(self, req: PairedRequest) -> PairedResponse:
        key = self._key(req.to_obj())
        if key not in self._by_request:
            raise UnscriptedRequest(f"no transcript entry for request {req.id}")
        resp_obj = dict(self._by_request[key])
        resp_obj["id"] = req.id
        return PairedResponse.from_obj(resp_obj)

    def close(self) -> None:
        pass
