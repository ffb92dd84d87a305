import { readFileSync } from 'node:fs';
import { join } from 'node:path';

import { describe, expect, it } from 'vitest';

import { handleLine, handshakeLine } from '../src/protocol';

const TRANSCRIPT = join(__dirname, '..', '..', 'fixtures', 'transcripts', 'conformance.jsonl');

describe('protocol conformance', () => {
  it('handshake announces protocol 1', () => {
    expect(handshakeLine()).toBe('{"protocol":1,"ready":true}');
  });

  it('reproduces the golden transcripts byte-for-byte', () => {
    const lines = readFileSync(TRANSCRIPT, 'utf-8')
      .split('\n')
      .filter((l) => l.trim());
    expect(lines.length).toBeGreaterThan(0);
    for (const line of lines) {
      const entry = JSON.parse(line);
      const raw = handleLine(JSON.stringify(entry.request));
      expect(raw).toBe(entry.response_raw);
    }
  });

  it('emits the source-done mark before running the target', () => {
    const marks: Record<string, unknown>[] = [];
    const req = {
      id: 42,
      source: { api: 'mini.sum', positional: [{ kind: 'tensor', shape: [1], dtype: 'f32', content: { values: [1] } }], keyword: {} },
      target: { api: 'mini.nope', positional: [], keyword: {} },
    };
    const raw = handleLine(JSON.stringify(req), (m) => marks.push(m));
    expect(marks).toEqual([{ mark: 'source_done', id: 42, status: 'success' }]);
    const resp = JSON.parse(raw);
    expect(resp.status_t).toBe('exception');
    expect(resp.exception_class_t).toBe('UnknownApi');
  });

  it('answers garbled requests with a protocol-error response', () => {
    const resp = JSON.parse(handleLine('definitely not json'));
    expect(resp.exception_class_s).toBe('ProtocolError');
  });

  it('value_equal present exactly when both sides succeed', () => {
    const tensorArg = { kind: 'tensor', shape: [2], dtype: 'f32', content: { values: [1, 2] } };
    const ok = JSON.parse(
      handleLine(
        JSON.stringify({
          id: 1,
          source: { api: 'mini.sum', positional: [tensorArg], keyword: {} },
          target: { api: 'mini.mean', positional: [tensorArg], keyword: {} },
        }),
      ),
    );
    expect(typeof ok.value_equal).toBe('boolean');
    const bad = JSON.parse(
      handleLine(
        JSON.stringify({
          id: 2,
          source: { api: 'mini.sum', positional: [tensorArg], keyword: {} },
          target: { api: 'mini.sum', positional: [], keyword: {} },
        }),
      ),
    );
    expect(bad.value_equal).toBeUndefined();
  });
});
