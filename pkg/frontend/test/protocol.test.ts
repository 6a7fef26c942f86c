import { describe, expect, it } from 'vitest';

import {
  gazeMessage,
  helloMessage,
  parseServerMessage,
  resetMessage,
} from '../src/protocol';

describe('client messages', () => {
  it('hello carries scenario and mode', () => {
    expect(JSON.parse(helloMessage('viktoria', 'guided'))).toEqual({
      type: 'hello',
      scenario: 'viktoria',
      mode: 'guided',
    });
  });

  it('gaze carries t, pos and wxyz quat', () => {
    const msg = JSON.parse(gazeMessage({ t: 0.5, pos: [1, 2, 3], quat: [1, 0, 0, 0] }));
    expect(msg).toEqual({ type: 'gaze', t: 0.5, pos: [1, 2, 3], quat: [1, 0, 0, 0] });
  });

  it('reset is bare', () => {
    expect(JSON.parse(resetMessage())).toEqual({ type: 'reset' });
  });
});

describe('parseServerMessage', () => {
  it('accepts ready, frame, and error', () => {
    expect(parseServerMessage('{"type":"ready","scenario":{}}').type).toBe('ready');
    expect(
      parseServerMessage(
        '{"type":"frame","t":0,"puck":null,"gazed_roi":null,"cue":null,"dwell_fraction":null,"events":[]}',
      ).type,
    ).toBe('frame');
    expect(parseServerMessage('{"type":"error","code":"x","detail":"y"}').type).toBe('error');
  });

  it('rejects junk', () => {
    expect(() => parseServerMessage('not json')).toThrow();
    expect(() => parseServerMessage('{"no":"type"}')).toThrow();
    expect(() => parseServerMessage('{"type":"mystery"}')).toThrow();
  });
});
