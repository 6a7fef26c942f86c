import { describe, expect, it } from 'vitest';

import { Frame, ScenarioSummary } from '../src/protocol';
import { SessionClient, Transport } from '../src/session';

class FakeTransport implements Transport {
  sent: string[] = [];
  onmessage: ((text: string) => void) | null = null;
  onclose: (() => void) | null = null;
  onopen: (() => void) | null = null;
  closed = false;

  send(text: string): void {
    this.sent.push(text);
  }

  close(): void {
    this.closed = true;
    this.onclose?.();
  }

  serverSays(obj: unknown): void {
    this.onmessage?.(JSON.stringify(obj));
  }
}

function makeClient() {
  const transport = new FakeTransport();
  const got = {
    ready: null as ScenarioSummary | null,
    frames: [] as Frame[],
    errors: [] as string[],
    closed: 0,
  };
  const client = new SessionClient(
    transport,
    {
      onReady: (s) => (got.ready = s),
      onFrame: (f) => got.frames.push(f),
      onError: (code) => got.errors.push(code),
      onClose: () => got.closed++,
    },
    'viktoria',
    'guided',
  );
  return { transport, client, got };
}

describe('SessionClient', () => {
  it('sends hello on open and surfaces ready', () => {
    const { transport, got } = makeClient();
    transport.onopen?.();
    expect(JSON.parse(transport.sent[0])).toEqual({
      type: 'hello', scenario: 'viktoria', mode: 'guided',
    });
    transport.serverSays({ type: 'ready', scenario: { tick_rate: 60 } });
    expect(got.ready).not.toBeNull();
  });

  it('records sent samples and received events for export', () => {
    const { transport, client, got } = makeClient();
    transport.onopen?.();
    transport.serverSays({ type: 'ready', scenario: { tick_rate: 60 } });
    client.sendGaze({ t: 0, pos: [0, 1.6, 2], quat: [1, 0, 0, 0] });
    client.sendGaze({ t: 1 / 60, pos: [0, 1.6, 2], quat: [1, 0, 0, 0] });
    transport.serverSays({
      type: 'frame', t: 0, puck: null, gazed_roi: null, cue: null,
      dwell_fraction: null,
      events: [{ t: 0, type: 'content_started', payload: { unit: 'intro' } }],
    });
    expect(client.samples).toHaveLength(2);
    expect(client.events).toHaveLength(1);
    expect(got.frames).toHaveLength(1);
  });

  it('drops gaze after close and reports errors', () => {
    const { transport, client, got } = makeClient();
    transport.onopen?.();
    transport.serverSays({ type: 'error', code: 'non_monotone_time', detail: 'x' });
    expect(got.errors).toEqual(['non_monotone_time']);
    transport.close();
    client.sendGaze({ t: 5, pos: [0, 0, 0], quat: [1, 0, 0, 0] });
    expect(transport.sent.filter((s) => s.includes('gaze'))).toHaveLength(0);
    expect(got.closed).toBe(1);
  });
});
