/**
 * Minimal expression language for raw argument expressions.
 *
 * Grammar (Python-flavored subset): dotted names, calls with positional and
 * keyword arguments, attribute access, list/tuple displays, numbers,
 * single- or double-quoted strings, True/False/None, unary minus on
 * numbers.  Reserved constructors materialize tensors directly:
 *
 *   __tensor__(values, shape, dtype)   inline content
 *   __seeded__(shape, dtype, seed)     deterministic pseudo-random content
 */

import { resolve } from './mini';
import { MiniError, Value, checkDtype, checkElementBudget, checkShapeArg, elementCount, isTensor, makeTensor, requireInt, requireNumberList, requireStr, seededValues } from './tensor';

type Token =
  | { kind: 'name'; text: string }
  | { kind: 'number'; value: number }
  | { kind: 'string'; value: string }
  | { kind: 'punct'; text: string };

const PUNCT = new Set(['(', ')', '[', ']', ',', '.', '=', '-']);

function tokenize(src: string): Token[] {
  const out: Token[] = [];
  let i = 0;
  while (i < src.length) {
    const c = src[i];
    if (c === ' ' || c === '\t' || c === '\n' || c === '\r') {
      i++;
      continue;
    }
    if (PUNCT.has(c)) {
      out.push({ kind: 'punct', text: c });
      i++;
      continue;
    }
    if (c === "'" || c === '"') {
      const quote = c;
      let j = i + 1;
      let value = '';
      while (j < src.length && src[j] !== quote) {
        if (src[j] === '\\') {
          const esc = src[j + 1];
          const simple: Record<string, string> = {
            n: '\n', t: '\t', r: '\r', '\\': '\\', "'": "'", '"': '"', '0': '\0',
          };
          if (esc in simple) {
            value += simple[esc];
            j += 2;
          } else if (esc === 'x') {
            value += String.fromCharCode(parseInt(src.slice(j + 2, j + 4), 16));
            j += 4;
          } else if (esc === 'u') {
            value += String.fromCharCode(parseInt(src.slice(j + 2, j + 6), 16));
            j += 6;
          } else {
            throw new MiniError('ValueError', `bad escape \\${esc}`);
          }
        } else {
          value += src[j];
          j++;
        }
      }
      if (j >= src.length) {
        throw new MiniError('ValueError', 'unterminated string literal');
      }
      out.push({ kind: 'string', value });
      i = j + 1;
      continue;
    }
    if (c >= '0' && c <= '9') {
      const m = /^\d+(\.\d*)?([eE][+-]?\d+)?/.exec(src.slice(i));
      if (!m) throw new MiniError('ValueError', `bad number at ${i}`);
      out.push({ kind: 'number', value: Number(m[0]) });
      i += m[0].length;
      continue;
    }
    if (/[A-Za-z_]/.test(c)) {
      const m = /^[A-Za-z_][A-Za-z0-9_]*/.exec(src.slice(i))!;
      out.push({ kind: 'name', text: m[0] });
      i += m[0].length;
      continue;
    }
    throw new MiniError('ValueError', `unexpected character '${c}' in expression`);
  }
  return out;
}

/** Namespace placeholder for partially-resolved dotted names like `mini`. */
interface Namespace {
  kind: 'namespace';
  path: string;
}

type Resolved = Value | Namespace | { kind: 'builtin'; name: string };

function isNamespace(v: Resolved): v is Namespace {
  return typeof v === 'object' && v !== null && !Array.isArray(v) && (v as Namespace).kind === 'namespace';
}

class Parser {
  private pos = 0;

  constructor(private tokens: Token[]) {}

  private peek(): Token | undefined {
    return this.tokens[this.pos];
  }

  private take(): Token {
    const t = this.tokens[this.pos++];
    if (!t) throw new MiniError('ValueError', 'unexpected end of expression');
    return t;
  }

  private expect(text: string): void {
    const t = this.take();
    if (t.kind !== 'punct' || t.text !== text) {
      throw new MiniError('ValueError', `expected '${text}'`);
    }
  }

  private atPunct(text: string): boolean {
    const t = this.peek();
    return !!t && t.kind === 'punct' && t.text === text;
  }

  parseExpression(): Resolved {
    let value = this.parsePrimary();
    for (;;) {
      if (this.atPunct('.')) {
        this.take();
        const name = this.take();
        if (name.kind !== 'name') throw new MiniError('ValueError', 'expected attribute name');
        value = attribute(value, name.text);
      } else if (this.atPunct('(')) {
        this.take();
        value = this.parseCall(value);
      } else {
        return value;
      }
    }
  }

  private parseCall(callee: Resolved): Resolved {
    const positional: Value[] = [];
    const keyword: Record<string, Value> = {};
    let sawKeyword = false;
    while (!this.atPunct(')')) {
      const t = this.peek();
      const next = this.tokens[this.pos + 1];
      if (t && t.kind === 'name' && next && next.kind === 'punct' && next.text === '=') {
        this.take();
        this.take();
        keyword[t.text] = toValue(this.parseExpression());
        sawKeyword = true;
      } else {
        if (sawKeyword) throw new MiniError('ValueError', 'positional argument after keyword');
        positional.push(toValue(this.parseExpression()));
      }
      if (this.atPunct(',')) this.take();
      else break;
    }
    this.expect(')');
    return callResolved(callee, positional, keyword);
  }

  private parsePrimary(): Resolved {
    const t = this.take();
    if (t.kind === 'number') return t.value;
    if (t.kind === 'string') return t.value;
    if (t.kind === 'name') {
      if (t.text === 'True') return true;
      if (t.text === 'False') return false;
      if (t.text === 'None') return null;
      if (t.text === '__tensor__' || t.text === '__seeded__') {
        return { kind: 'builtin', name: t.text };
      }
      return { kind: 'namespace', path: t.text };
    }
    if (t.kind === 'punct' && t.text === '-') {
      const n = this.take();
      if (n.kind !== 'number') throw new MiniError('ValueError', 'unary minus expects a number');
      return -n.value;
    }
    if (t.kind === 'punct' && t.text === '[') {
      const items: Value[] = [];
      while (!this.atPunct(']')) {
        items.push(toValue(this.parseExpression()));
        if (this.atPunct(',')) this.take();
        else break;
      }
      this.expect(']');
      return items;
    }
    if (t.kind === 'punct' && t.text === '(') {
      const items: Value[] = [];
      let trailingComma = false;
      while (!this.atPunct(')')) {
        items.push(toValue(this.parseExpression()));
        trailingComma = false;
        if (this.atPunct(',')) {
          this.take();
          trailingComma = true;
        } else break;
      }
      this.expect(')');
      if (items.length === 1 && !trailingComma) {
        return items[0]; // parenthesized expression
      }
      return { kind: 'tuple', items };
    }
    throw new MiniError('ValueError', `unexpected token in expression`);
  }

  done(): boolean {
    return this.pos >= this.tokens.length;
  }
}

function attribute(base: Resolved, name: string): Resolved {
  if (isNamespace(base)) {
    return { kind: 'namespace', path: `${base.path}.${name}` };
  }
  const v = toValue(base);
  if (isTensor(v)) {
    if (name === 'dtype') return v.dtype;
    if (name === 'shape') return [...v.shape];
  }
  throw new MiniError('TypeError', `no attribute '${name}'`);
}

function callResolved(callee: Resolved, positional: Value[], keyword: Record<string, Value>): Value {
  if (typeof callee === 'object' && callee !== null && !Array.isArray(callee)) {
    if ((callee as Namespace).kind === 'namespace') {
      const path = (callee as Namespace).path;
      return invokeByName(path, positional, keyword);
    }
    if ((callee as { kind: string }).kind === 'builtin') {
      const name = (callee as { kind: 'builtin'; name: string }).name;
      if (Object.keys(keyword).length) {
        throw new MiniError('TypeError', `${name} takes no keyword arguments`);
      }
      if (name === '__tensor__') {
        const [values, shape, dtype] = positional;
        const dims = (shape as number[]).map((d) => d); // may contain negatives
        if (!Array.isArray(shape)) throw new MiniError('TypeError', 'shape must be a list');
        const vals = requireNumberList(values, 'values');
        const dt = checkDtype(requireStr(dtype, 'dtype'));
        const nonNegative = dims.every((d) => Number.isInteger(d) && d >= 0);
        if (!nonNegative) {
          throw new MiniError('ValueError', `negative dimension in shape [${dims}]`);
        }
        if (vals.length !== elementCount(dims)) {
          throw new MiniError('ValueError', 'values do not fill the shape');
        }
        return makeTensor(dims, dt, vals);
      }
      // __seeded__
      const [shape, dtype, seed] = positional;
      const dims = checkShapeArg(shape);
      const dt = checkDtype(requireStr(dtype, 'dtype'));
      const s = requireInt(seed, 'seed');
      checkElementBudget(elementCount(dims));
      return makeTensor(dims, dt, seededValues(elementCount(dims), s));
    }
  }
  throw new MiniError('TypeError', 'value is not callable');
}

function toValue(v: Resolved): Value {
  if (isNamespace(v)) {
    throw new MiniError('TypeError', `name '${v.path}' is not a value`);
  }
  if (typeof v === 'object' && v !== null && !Array.isArray(v) && (v as { kind?: string }).kind === 'builtin') {
    throw new MiniError('TypeError', 'constructor is not a value');
  }
  return v as Value;
}

/** Apply positional + keyword arguments to a registered mini function. */
export function invokeByName(
  qualifiedName: string,
  positional: Value[],
  keyword: Record<string, Value>,
): Value {
  const fn = resolve(qualifiedName);
  const params = SIGNATURES[qualifiedName];
  if (!params) {
    throw new MiniError('UnknownApi', `no signature for '${qualifiedName}'`);
  }
  if (positional.length > params.length) {
    throw new MiniError('TypeError', `${qualifiedName} takes at most ${params.length} arguments`);
  }
  const slots: (Value | undefined)[] = new Array(params.length).fill(undefined);
  positional.forEach((v, i) => (slots[i] = v));
  for (const [name, v] of Object.entries(keyword)) {
    const idx = params.indexOf(name);
    if (idx < 0) {
      throw new MiniError('TypeError', `${qualifiedName} has no argument '${name}'`);
    }
    if (slots[idx] !== undefined) {
      throw new MiniError('TypeError', `duplicate value for argument '${name}'`);
    }
    slots[idx] = v;
  }
  // trailing undefined slots fall through to JS default parameters
  let lastSet = -1;
  for (let i = 0; i < slots.length; i++) if (slots[i] !== undefined) lastSet = i;
  return fn(...(slots.slice(0, lastSet + 1) as Value[]));
}

/** Declared parameter names, in positional order, for keyword resolution. */
export const SIGNATURES: Record<string, string[]> = {
  'mini.array': ['values', 'shape', 'dtype'],
  'mini.zeros': ['shape', 'dtype'],
  'mini.ones': ['shape', 'dtype'],
  'mini.full': ['shape', 'fill_value', 'dtype'],
  'mini.rand': ['shape', 'dtype', 'seed'],
  'mini.negate': ['x'],
  'mini.absolute': ['x'],
  'mini.square': ['x'],
  'mini.sqrt': ['x'],
  'mini.identity': ['x'],
  'mini.sum': ['x'],
  'mini.total': ['x'],
  'mini.mean': ['x'],
  'mini.reshape': ['x', 'shape'],
  'mini.transpose': ['x'],
  'mini.flatten': ['x'],
  'mini.add': ['x', 'y'],
  'mini.subtract': ['x', 'y'],
  'mini.multiply': ['x', 'y'],
  'mini.divide': ['x', 'y'],
  'mini.maximum': ['x', 'y'],
  'mini.minimum': ['x', 'y'],
  'mini.matmul': ['x', 'y'],
  'mini.vsplit': ['x', 'sections'],
  'mini.tensor_split': ['x', 'sections', 'dim'],
  'mini.kthvalue': ['x', 'k'],
  'mini.kth_value': ['x', 'k'],
  'mini.avg_pool': ['x', 'output_size'],
  'mini.max_pool': ['x', 'output_size'],
  'mini.scatter': ['indices', 'updates', 'shape'],
  'mini.scatter_add': ['base', 'indices', 'updates'],
  'mini.cast': ['x', 'dtype'],
};

/** Evaluate one raw expression to a live value. */
export function evaluateExpression(src: string): Value {
  const parser = new Parser(tokenize(src));
  const value = toValue(parser.parseExpression());
  if (!parser.done()) {
    throw new MiniError('ValueError', 'trailing tokens in expression');
  }
  return value;
}
