/**
 * The `mini` toy array library: ~30 documented operations over the dense
 * Tensor value, resolvable by qualified name for reflective invocation.
 *
 * Validation is deliberately uniform across operations (shared helpers), so
 * related operations agree on every malformed input, except for the two
 * seeded bugs:
 *   - kthvalue / kth_value skip the range check on k and disagree for
 *     out-of-range k (wrap vs clamp),
 *   - avg_pool skips the negative-output-size check that max_pool performs.
 */

import {
  DType,
  MiniError,
  Tensor,
  Value,
  checkDtype,
  checkElementBudget,
  checkShapeArg,
  elementCount,
  isTensor,
  makeTensor,
  requireInt,
  requireIntList,
  requireNumber,
  requireNumberList,
  requireSameDtype,
  requireSameShape,
  requireStr,
  requireTensor,
  seededValues,
} from './tensor';

export type MiniFn = (...args: Value[]) => Value;

// -- creation ----------------------------------------------------------------

function array(values: Value, shape: Value, dtype: Value = 'f32'): Value {
  const vals = requireNumberList(values, 'values');
  const dims = checkShapeArg(shape);
  const dt = checkDtype(requireStr(dtype, 'dtype'));
  if (vals.length !== elementCount(dims)) {
    throw new MiniError('ValueError', `cannot arrange ${vals.length} values into shape [${dims}]`);
  }
  return makeTensor(dims, dt, vals);
}

function zeros(shape: Value, dtype: Value = 'f32'): Value {
  const dims = checkShapeArg(shape);
  const dt = checkDtype(requireStr(dtype, 'dtype'));
  checkElementBudget(elementCount(dims));
  return makeTensor(dims, dt, new Array(elementCount(dims)).fill(0));
}

function ones(shape: Value, dtype: Value = 'f32'): Value {
  const dims = checkShapeArg(shape);
  const dt = checkDtype(requireStr(dtype, 'dtype'));
  checkElementBudget(elementCount(dims));
  return makeTensor(dims, dt, new Array(elementCount(dims)).fill(1));
}

function full(shape: Value, fillValue: Value, dtype: Value = 'f32'): Value {
  const dims = checkShapeArg(shape);
  const fill = requireNumber(fillValue, 'fill_value');
  const dt = checkDtype(requireStr(dtype, 'dtype'));
  checkElementBudget(elementCount(dims));
  return makeTensor(dims, dt, new Array(elementCount(dims)).fill(fill));
}

function rand(shape: Value, dtype: Value = 'f32', seed: Value = 0): Value {
  const dims = checkShapeArg(shape);
  const dt = checkDtype(requireStr(dtype, 'dtype'));
  const s = requireInt(seed, 'seed');
  checkElementBudget(elementCount(dims));
  return makeTensor(dims, dt, seededValues(elementCount(dims), s));
}

// -- elementwise unary ---------------------------------------------------------

function mapUnary(name: string, f: (v: number) => number): MiniFn {
  return (x: Value) => {
    const t = requireTensor(x, 'x');
    return makeTensor(t.shape, t.dtype, t.data.map(f));
  };
}

const negate = mapUnary('negate', (v) => -v);
const absolute = mapUnary('absolute', Math.abs);
const square = mapUnary('square', (v) => v * v);
const sqrt = mapUnary('sqrt', Math.sqrt);

function identity(x: Value): Value {
  requireTensor(x, 'x');
  // test hook: environment-triggered hard crash for crash-containment tests
  if (process.env.MINI_ABORT_IDENTITY === '1') {
    process.abort();
  }
  return x;
}

// -- reductions ----------------------------------------------------------------

function sum(x: Value): Value {
  const t = requireTensor(x, 'x');
  return t.data.reduce((a, b) => a + b, 0);
}

function mean(x: Value): Value {
  const t = requireTensor(x, 'x');
  return (sum(t) as number) / t.data.length;
}

// -- shape ops -------------------------------------------------------------

function reshape(x: Value, shape: Value): Value {
  const t = requireTensor(x, 'x');
  const dims = checkShapeArg(shape);
  if (elementCount(dims) !== t.data.length) {
    throw new MiniError('ValueError', `cannot reshape ${t.data.length} elements into [${dims}]`);
  }
  return makeTensor(dims, t.dtype, t.data);
}

function transpose(x: Value): Value {
  const t = requireTensor(x, 'x');
  const rank = t.shape.length;
  if (rank < 2) {
    return makeTensor(t.shape, t.dtype, t.data);
  }
  const outShape = [...t.shape].reverse();
  const inStrides: number[] = new Array(rank).fill(1);
  for (let i = rank - 2; i >= 0; i--) inStrides[i] = inStrides[i + 1] * t.shape[i + 1];
  const outStrides: number[] = new Array(rank).fill(1);
  for (let i = rank - 2; i >= 0; i--) outStrides[i] = outStrides[i + 1] * outShape[i + 1];
  const out = new Array(t.data.length).fill(0);
  for (let flat = 0; flat < t.data.length; flat++) {
    let rest = flat;
    let dst = 0;
    for (let i = 0; i < rank; i++) {
      const idx = Math.floor(rest / inStrides[i]);
      rest %= inStrides[i];
      dst += idx * outStrides[rank - 1 - i];
    }
    out[dst] = t.data[flat];
  }
  return makeTensor(outShape, t.dtype, out);
}

function flatten(x: Value): Value {
  const t = requireTensor(x, 'x');
  return makeTensor([t.data.length], t.dtype, t.data);
}

// -- elementwise binary ------------------------------------------------------

function zipBinary(name: string, f: (a: number, b: number) => number): MiniFn {
  return (x: Value, y: Value) => {
    const tx = requireTensor(x, 'x');
    const ty = requireTensor(y, 'y');
    requireSameShape(tx, ty);
    requireSameDtype(tx, ty);
    return makeTensor(tx.shape, tx.dtype, tx.data.map((v, i) => f(v, ty.data[i])));
  };
}

const add = zipBinary('add', (a, b) => a + b);
const subtract = zipBinary('subtract', (a, b) => a - b);
const multiply = zipBinary('multiply', (a, b) => a * b);
const divide = zipBinary('divide', (a, b) => a / b);
const maximum = zipBinary('maximum', Math.max);
const minimum = zipBinary('minimum', Math.min);

function matmul(x: Value, y: Value): Value {
  const tx = requireTensor(x, 'x');
  const ty = requireTensor(y, 'y');
  requireSameDtype(tx, ty);
  if (tx.shape.length !== 2 || ty.shape.length !== 2) {
    throw new MiniError('ValueError', 'matmul expects rank-2 tensors');
  }
  const [n, k] = tx.shape;
  const [k2, m] = ty.shape;
  if (k !== k2) {
    throw new MiniError('ValueError', `matmul shapes do not conform: [${tx.shape}] x [${ty.shape}]`);
  }
  const out = new Array(n * m).fill(0);
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < m; j++) {
      let acc = 0;
      for (let p = 0; p < k; p++) acc += tx.data[i * k + p] * ty.data[p * m + j];
      out[i * m + j] = acc;
    }
  }
  return makeTensor([n, m], tx.dtype, out);
}

// -- splitting ---------------------------------------------------------------

function tensorSplit(x: Value, sections: Value, dim: Value = 0): Value {
  const t = requireTensor(x, 'x');
  const s = requireInt(sections, 'sections');
  const d = requireInt(dim, 'dim');
  if (s < 1) {
    throw new MiniError('ValueError', 'sections must be positive');
  }
  if (d < 0 || d >= t.shape.length) {
    throw new MiniError('IndexError', `dim ${d} out of range for rank ${t.shape.length}`);
  }
  if (t.shape[d] % s !== 0) {
    throw new MiniError('ValueError', `dimension ${t.shape[d]} is not divisible into ${s} sections`);
  }
  const step = t.shape[d] / s;
  const outer = elementCount(t.shape.slice(0, d));
  const inner = elementCount(t.shape.slice(d + 1));
  const parts: Value[] = [];
  for (let part = 0; part < s; part++) {
    const data: number[] = [];
    for (let o = 0; o < outer; o++) {
      const base = o * t.shape[d] * inner + part * step * inner;
      for (let i = 0; i < step * inner; i++) data.push(t.data[base + i]);
    }
    const shape = [...t.shape];
    shape[d] = step;
    parts.push(makeTensor(shape, t.dtype, data));
  }
  return parts;
}

function vsplit(x: Value, sections: Value): Value {
  return tensorSplit(x, sections, 0);
}

// -- order statistics (seeded value bug) ----------------------------------------

function sortedElements(x: Value, k: Value): { data: number[]; k: number } {
  const t = requireTensor(x, 'x');
  const kk = requireInt(k, 'k');
  if (t.data.length === 0) {
    throw new MiniError('ValueError', 'empty input');
  }
  return { data: [...t.data].sort((a, b) => a - b), k: kk };
}

// Neither variant validates the range of k; they read different elements
// for out-of-range k (wrap-around vs clamp), mirroring an out-of-bounds read.
function kthvalue(x: Value, k: Value): Value {
  const { data, k: kk } = sortedElements(x, k);
  const n = data.length;
  const idx = (((kk - 1) % n) + n) % n;
  return data[idx];
}

function kthValue(x: Value, k: Value): Value {
  const { data, k: kk } = sortedElements(x, k);
  const idx = Math.min(Math.max(kk - 1, 0), data.length - 1);
  return data[idx];
}

// -- adaptive pooling (seeded status bug) --------------------------------------

function poolWindows(x: Value, outputSize: Value, what: string): { t: Tensor; size: number } {
  const t = requireTensor(x, 'x');
  if (t.shape.length !== 1) {
    throw new MiniError('ValueError', `${what} expects a one-dimensional tensor`);
  }
  if (t.data.length === 0) {
    throw new MiniError('ValueError', 'empty input');
  }
  const sizes = requireIntList(outputSize, 'output_size');
  if (sizes.length !== 1) {
    throw new MiniError('ValueError', 'output_size must have one entry per input dimension');
  }
  return { t, size: sizes[0] };
}

function adaptivePool(t: Tensor, size: number, reduce: (w: number[]) => number): Value {
  checkElementBudget(size);
  const n = t.data.length;
  const out: number[] = [];
  for (let i = 0; i < size; i++) {
    const start = Math.floor((i * n) / size);
    const end = Math.ceil(((i + 1) * n) / size);
    out.push(reduce(t.data.slice(start, end)));
  }
  return makeTensor([size], t.dtype, out);
}

function avgPool(x: Value, outputSize: Value): Value {
  const { t, size } = poolWindows(x, outputSize, 'avg_pool');
  // missing negative-size validation: silently clamps instead of raising
  const effective = Math.max(size, 0);
  return adaptivePool(t, effective, (w) => w.reduce((a, b) => a + b, 0) / w.length);
}

function maxPool(x: Value, outputSize: Value): Value {
  const { t, size } = poolWindows(x, outputSize, 'max_pool');
  if (size < 0) {
    throw new MiniError('ValueError', `cannot build an output with negative size ${size}`);
  }
  return adaptivePool(t, size, (w) => Math.max(...w));
}

// -- scatter ----------------------------------------------------------------

function scatterAddInto(base: Tensor, indices: Value, updates: Value): Value {
  const idx = requireIntList(indices, 'indices');
  const upd = requireTensor(updates, 'updates');
  if (base.shape.length !== 1 || upd.shape.length !== 1) {
    throw new MiniError('ValueError', 'scatter expects one-dimensional operands');
  }
  if (idx.length !== upd.data.length) {
    throw new MiniError('ValueError', `got ${idx.length} indices for ${upd.data.length} updates`);
  }
  const out = [...base.data];
  for (let i = 0; i < idx.length; i++) {
    const j = idx[i];
    if (j < 0 || j >= out.length) {
      throw new MiniError('IndexError', `index ${j} out of bounds for size ${out.length}`);
    }
    out[j] += upd.data[i];
  }
  return makeTensor(base.shape, base.dtype, out);
}

function scatter(indices: Value, updates: Value, shape: Value): Value {
  const upd = requireTensor(updates, 'updates');
  const base = zeros(shape, upd.dtype) as Tensor;
  return scatterAddInto(base, indices, updates);
}

function scatterAdd(base: Value, indices: Value, updates: Value): Value {
  return scatterAddInto(requireTensor(base, 'base'), indices, updates);
}

// -- dtype conversion ---------------------------------------------------------

function cast(x: Value, dtype: Value): Value {
  const t = requireTensor(x, 'x');
  const dt = checkDtype(requireStr(dtype, 'dtype'));
  return makeTensor(t.shape, dt, t.data);
}

// -- registry -----------------------------------------------------------------

export const registry: Record<string, MiniFn> = {
  'mini.array': array as MiniFn,
  'mini.zeros': zeros as MiniFn,
  'mini.ones': ones as MiniFn,
  'mini.full': full as MiniFn,
  'mini.rand': rand as MiniFn,
  'mini.negate': negate,
  'mini.absolute': absolute,
  'mini.square': square,
  'mini.sqrt': sqrt,
  'mini.identity': identity as MiniFn,
  'mini.sum': sum as MiniFn,
  'mini.total': sum as MiniFn, // alias: same implementation object
  'mini.mean': mean as MiniFn,
  'mini.reshape': reshape as MiniFn,
  'mini.transpose': transpose as MiniFn,
  'mini.flatten': flatten as MiniFn,
  'mini.add': add,
  'mini.subtract': subtract,
  'mini.multiply': multiply,
  'mini.divide': divide,
  'mini.maximum': maximum,
  'mini.minimum': minimum,
  'mini.matmul': matmul as MiniFn,
  'mini.vsplit': vsplit as MiniFn,
  'mini.tensor_split': tensorSplit as MiniFn,
  'mini.kthvalue': kthvalue as MiniFn,
  'mini.kth_value': kthValue as MiniFn,
  'mini.avg_pool': avgPool as MiniFn,
  'mini.max_pool': maxPool as MiniFn,
  'mini.scatter': scatter as MiniFn,
  'mini.scatter_add': scatterAdd as MiniFn,
  'mini.cast': cast as MiniFn,
};

export function resolve(qualifiedName: string): MiniFn {
  const fn = registry[qualifiedName];
  if (!fn) {
    throw new MiniError('UnknownApi', `no api named '${qualifiedName}'`);
  }
  return fn;
}
