/**
 * Wire protocol v1: one JSON request line in, exactly one JSON response
 * line out.  Source executes before target; a structured "source_done"
 * mark on stderr lets the supervising client attribute process deaths to
 * the correct side.
 */

import { compareValues, summarize, Tolerance } from './compare';
import { invokeByName } from './exprs';
import { materialize, ValueObj } from './materialize';
import { MiniError, Value } from './tensor';

export const PROTOCOL_VERSION = 1;

interface SideObj {
  api: string;
  positional?: ValueObj[];
  keyword?: Record<string, ValueObj>;
}

interface RequestObj {
  id: number;
  source: SideObj;
  target: SideObj;
  tolerance?: { rtol?: number; atol?: number };
  timeout_ms?: number;
}

interface SideResult {
  status: 'success' | 'exception';
  value?: Value;
  exceptionClass?: string;
}

function runSide(side: SideObj): SideResult {
  try {
    const positional = (side.positional ?? []).map(materialize);
    const keyword: Record<string, Value> = {};
    for (const [k, v] of Object.entries(side.keyword ?? {})) {
      keyword[k] = materialize(v);
    }
    const value = invokeByName(side.api, positional, keyword);
    return { status: 'success', value };
  } catch (err) {
    if (err instanceof MiniError) {
      return { status: 'exception', exceptionClass: err.name };
    }
    // unexpected engine errors still count as exceptions, with their class
    return { status: 'exception', exceptionClass: (err as Error).constructor.name };
  }
}

/** Deterministic JSON: object keys sorted recursively. */
export function stableStringify(v: unknown): string {
  if (v === null || typeof v !== 'object') {
    return JSON.stringify(v);
  }
  if (Array.isArray(v)) {
    return '[' + v.map(stableStringify).join(',') + ']';
  }
  const keys = Object.keys(v as Record<string, unknown>).sort();
  const parts = keys
    .filter((k) => (v as Record<string, unknown>)[k] !== undefined)
    .map((k) => JSON.stringify(k) + ':' + stableStringify((v as Record<string, unknown>)[k]));
  return '{' + parts.join(',') + '}';
}

export function handshakeLine(): string {
  return stableStringify({ ready: true, protocol: PROTOCOL_VERSION });
}

export type MarkWriter = (mark: Record<string, unknown>) => void;

export function handleRequest(req: RequestObj, writeMark: MarkWriter = () => {}): string {
  const tol: Tolerance = {
    rtol: req.tolerance?.rtol ?? 1e-3,
    atol: req.tolerance?.atol ?? 1e-6,
  };
  const source = runSide(req.source);
  writeMark({
    mark: 'source_done',
    id: req.id,
    status: source.status,
    ...(source.exceptionClass ? { exception_class: source.exceptionClass } : {}),
  });
  const target = runSide(req.target);

  const resp: Record<string, unknown> = {
    id: req.id,
    status_s: source.status,
    status_t: target.status,
  };
  if (source.exceptionClass) resp.exception_class_s = source.exceptionClass;
  if (target.exceptionClass) resp.exception_class_t = target.exceptionClass;
  if (source.status === 'success' && target.status === 'success') {
    resp.value_equal = compareValues(source.value as Value, target.value as Value, tol);
    resp.value_summary_s = summarize(source.value as Value);
    resp.value_summary_t = summarize(target.value as Value);
  } else {
    if (source.status === 'success') resp.value_summary_s = summarize(source.value as Value);
    if (target.status === 'success') resp.value_summary_t = summarize(target.value as Value);
  }
  return stableStringify(resp);
}

export function handleLine(line: string, writeMark: MarkWriter = () => {}): string {
  let req: RequestObj;
  try {
    req = JSON.parse(line) as RequestObj;
  } catch {
    // a garbled request still gets exactly one response line
    return stableStringify({
      id: -1,
      status_s: 'exception',
      status_t: 'exception',
      exception_class_s: 'ProtocolError',
      exception_class_t: 'ProtocolError',
    });
  }
  return handleRequest(req, writeMark);
}
