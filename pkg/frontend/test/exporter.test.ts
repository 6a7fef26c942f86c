import { describe, expect, it } from 'vitest';

import { eventsFileText, traceFileText } from '../src/exporter';

describe('trace export', () => {
  it('writes the engine trace format', () => {
    const text = traceFileText([
      { t: 0, pos: [0, 1.6, 2], quat: [1, 0, 0, 0] },
      { t: 1 / 60, pos: [0, 1.6, 2], quat: [1, 0, 0, 0] },
    ]);
    const lines = text.trimEnd().split('\n');
    expect(JSON.parse(lines[0])).toEqual({ version: 1, kind: 'trace' });
    const sample = JSON.parse(lines[1]);
    expect(Object.keys(sample)).toEqual(['t', 'pos', 'quat']);
    expect(sample.pos).toHaveLength(3);
    expect(sample.quat).toHaveLength(4);
    expect(text.endsWith('\n')).toBe(true);
  });

  it('rejects non-increasing timestamps', () => {
    expect(() =>
      traceFileText([
        { t: 0.5, pos: [0, 0, 0], quat: [1, 0, 0, 0] },
        { t: 0.5, pos: [0, 0, 0], quat: [1, 0, 0, 0] },
      ]),
    ).toThrow(/increase/);
  });
});

describe('events export', () => {
  it('writes the engine event-log format', () => {
    const text = eventsFileText(
      [
        { t: 0, type: 'content_started', payload: { unit: 'intro' } },
        { t: 360, type: 'content_finished', payload: { unit: 'intro' } },
      ],
      60,
    );
    const lines = text.trimEnd().split('\n');
    expect(JSON.parse(lines[0])).toEqual({ version: 1, kind: 'events', tick_rate: 60 });
    const first = JSON.parse(lines[1]);
    expect(Object.keys(first)).toEqual(['t', 'type', 'payload']);
    expect(first.t).toBe(0);
    expect(first.payload.unit).toBe('intro');
  });
});
