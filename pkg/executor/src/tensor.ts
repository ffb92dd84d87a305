/**
 * Dense-array value model shared by every mini operation.
 *
 * All numeric data is stored as JS numbers (float64); the dtype tag drives
 * coercion at construction time and exact-vs-tolerant comparison later, so
 * aliased operations stay bit-identical by construction.
 */

export type DType = 'f32' | 'f64' | 'i32' | 'i64' | 'bool';

export const DTYPES: DType[] = ['f32', 'f64', 'i32', 'i64', 'bool'];

export interface Tensor {
  kind: 'tensor';
  dtype: DType;
  shape: number[];
  data: number[];
}

export interface Tuple {
  kind: 'tuple';
  items: Value[];
}

export type Value = Tensor | Tuple | Value[] | number | boolean | string | null;

/** Library-level error whose name becomes the reported exception class. */
export class MiniError extends Error {
  constructor(klass: string, message: string) {
    super(message);
    this.name = klass;
  }
}

export function isTensor(v: Value): v is Tensor {
  return typeof v === 'object' && v !== null && !Array.isArray(v) && (v as Tensor).kind === 'tensor';
}

export function isTuple(v: Value): v is Tuple {
  return typeof v === 'object' && v !== null && !Array.isArray(v) && (v as Tuple).kind === 'tuple';
}

function coerce(value: number, dtype: DType): number {
  switch (dtype) {
    case 'f32':
      return Math.fround(value);
    case 'f64':
      return value;
    case 'bool':
      return value !== 0 ? 1 : 0;
    default:
      return Math.trunc(value);
  }
}

export function elementCount(shape: number[]): number {
  let n = 1;
  for (const d of shape) n *= d;
  return n;
}

/** Allocation ceiling; absurd fuzz inputs raise instead of hanging the process. */
export const MAX_ELEMENTS = 1_000_000;

export function checkElementBudget(count: number): void {
  if (count > MAX_ELEMENTS) {
    throw new MiniError('ValueError', `tensor with ${count} elements exceeds the size limit`);
  }
}

export function checkDtype(tag: string): DType {
  if (!(DTYPES as string[]).includes(tag)) {
    throw new MiniError('ValueError', `unknown dtype '${tag}'`);
  }
  return tag as DType;
}

/** Shape arguments must be lists of non-negative integers. */
export function checkShapeArg(v: Value, what = 'shape'): number[] {
  if (!Array.isArray(v)) {
    throw new MiniError('TypeError', `${what} must be a list of integers`);
  }
  const shape: number[] = [];
  for (const d of v) {
    if (typeof d !== 'number' || !Number.isInteger(d)) {
      throw new MiniError('TypeError', `${what} must be a list of integers`);
    }
    if (d < 0) {
      throw new MiniError('ValueError', `negative dimension ${d} in ${what}`);
    }
    shape.push(d);
  }
  return shape;
}

export function makeTensor(shape: number[], dtype: DType, data: number[]): Tensor {
  return { kind: 'tensor', dtype, shape: [...shape], data: data.map((v) => coerce(v, dtype)) };
}

export function requireTensor(v: Value, name: string): Tensor {
  if (!isTensor(v)) {
    throw new MiniError('TypeError', `${name} must be a tensor`);
  }
  return v;
}

export function requireInt(v: Value, name: string): number {
  if (typeof v !== 'number' || !Number.isInteger(v)) {
    throw new MiniError('TypeError', `${name} must be an integer`);
  }
  return v;
}

export function requireNumber(v: Value, name: string): number {
  if (typeof v !== 'number') {
    throw new MiniError('TypeError', `${name} must be a number`);
  }
  return v;
}

export function requireStr(v: Value, name: string): string {
  if (typeof v !== 'string') {
    throw new MiniError('TypeError', `${name} must be a string`);
  }
  return v;
}

export function requireNumberList(v: Value, name: string): number[] {
  if (!Array.isArray(v) || v.some((x) => typeof x !== 'number')) {
    throw new MiniError('TypeError', `${name} must be a list of numbers`);
  }
  return v as number[];
}

export function requireIntList(v: Value, name: string): number[] {
  if (!Array.isArray(v) || v.some((x) => typeof x !== 'number' || !Number.isInteger(x))) {
    throw new MiniError('TypeError', `${name} must be a list of integers`);
  }
  return v as number[];
}

export function requireSameShape(x: Tensor, y: Tensor): void {
  if (x.shape.length !== y.shape.length || x.shape.some((d, i) => d !== y.shape[i])) {
    throw new MiniError('ValueError', `shape mismatch: [${x.shape}] vs [${y.shape}]`);
  }
}

export function requireSameDtype(x: Tensor, y: Tensor): void {
  if (x.dtype !== y.dtype) {
    throw new MiniError('TypeError', `dtype mismatch: ${x.dtype} vs ${y.dtype}`);
  }
}

/** Deterministic pseudo-random fill in [0, 1): a 32-bit LCG on the seed. */
export function seededValues(count: number, seed: number): number[] {
  let state = seed >>> 0;
  const out: number[] = [];
  for (let i = 0; i < count; i++) {
    state = (Math.imul(state, 1664525) + 1013904223) >>> 0;
    out.push(state / 4294967296);
  }
  return out;
}
