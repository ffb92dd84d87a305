/**
 * Result comparison under tolerance, and compact value summaries.
 *
 * Float content compares elementwise as |x - y| <= atol + rtol * |y| (with
 * an exact fast path so infinities of the same sign are equal and NaN never
 * is); integer and bool dtypes, strings, and structure compare exactly.
 * Summary hashes cover dtype, shape and the IEEE-754 bytes of every
 * element, so they are stable across languages.
 */

import { createHash } from 'node:crypto';

import { Tensor, Value, isTensor, isTuple } from './tensor';

export interface Tolerance {
  rtol: number;
  atol: number;
}

const FLOAT_DTYPES = new Set(['f32', 'f64']);

function closeNum(x: number, y: number, tol: Tolerance): boolean {
  if (x === y) return true;
  return Math.abs(x - y) <= tol.atol + tol.rtol * Math.abs(y);
}

export function compareValues(a: Value, b: Value, tol: Tolerance): boolean {
  if (isTensor(a) || isTensor(b)) {
    if (!isTensor(a) || !isTensor(b)) return false;
    if (a.dtype !== b.dtype) return false;
    if (a.shape.length !== b.shape.length || a.shape.some((d, i) => d !== b.shape[i])) return false;
    if (a.data.length !== b.data.length) return false;
    if (FLOAT_DTYPES.has(a.dtype)) {
      return a.data.every((v, i) => closeNum(v, b.data[i], tol));
    }
    return a.data.every((v, i) => v === b.data[i]);
  }
  if (Array.isArray(a) || Array.isArray(b)) {
    if (!Array.isArray(a) || !Array.isArray(b) || a.length !== b.length) return false;
    return a.every((v, i) => compareValues(v, b[i], tol));
  }
  if (isTuple(a) || isTuple(b)) {
    if (!isTuple(a) || !isTuple(b) || a.items.length !== b.items.length) return false;
    return a.items.every((v, i) => compareValues(v, b.items[i], tol));
  }
  if (typeof a === 'number' && typeof b === 'number') {
    return closeNum(a, b, tol);
  }
  return a === b;
}

function contentHash(t: Tensor): string {
  const h = createHash('sha256');
  h.update(t.dtype);
  h.update('|');
  h.update(t.shape.map((d) => String(d)).join(','));
  h.update('|');
  const buf = Buffer.alloc(8);
  for (const v of t.data) {
    buf.writeDoubleBE(v);
    h.update(buf);
  }
  return h.digest('hex');
}

const SUMMARY_PREFIX = 8;

export function summarize(v: Value): Record<string, unknown> {
  if (isTensor(v)) {
    return {
      kind: 'tensor',
      dtype: v.dtype,
      shape: [...v.shape],
      count: v.data.length,
      first: v.data.slice(0, SUMMARY_PREFIX),
      hash: contentHash(v),
    };
  }
  if (Array.isArray(v)) {
    return { kind: 'list', items: v.map(summarize) };
  }
  if (isTuple(v)) {
    return { kind: 'tuple', items: v.items.map(summarize) };
  }
  if (typeof v === 'number') return { kind: 'number', value: v };
  if (typeof v === 'boolean') return { kind: 'bool', value: v };
  if (typeof v === 'string') return { kind: 'str', value: v };
  return { kind: 'none' };
}
