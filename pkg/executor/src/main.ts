/**
 * Executor entry point: handshake, then serve newline-delimited JSON
 * requests over stdin/stdout.  Nothing but responses goes to stdout; marks
 * and logs go to stderr.
 */

import { createInterface } from 'node:readline';

import { handleLine, handshakeLine } from './protocol';

function main(): void {
  process.stdout.write(handshakeLine() + '\n');
  const rl = createInterface({ input: process.stdin, terminal: false });
  rl.on('line', (line: string) => {
    if (!line.trim()) return;
    const response = handleLine(line, (mark) => {
      process.stderr.write(JSON.stringify(mark) + '\n');
    });
    process.stdout.write(response + '\n');
  });
  rl.on('close', () => process.exit(0));
}

main();
