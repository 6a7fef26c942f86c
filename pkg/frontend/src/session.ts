// Session client: owns the websocket, the 60 Hz gaze stream, and the session
// recording (samples + events) used by the trace export.

import {
  EngineEvent,
  Frame,
  GazeSample,
  Mode,
  Ready,
  ScenarioSummary,
  gazeMessage,
  helloMessage,
  parseServerMessage,
} from './protocol';

export interface Transport {
  send(text: string): void;
  close(): void;
  onmessage: ((text: string) => void) | null;
  onclose: (() => void) | null;
  onopen: (() => void) | null;
}

export function websocketTransport(url: string): Transport {
  const ws = new WebSocket(url);
  const t: Transport = {
    send: (text) => ws.send(text),
    close: () => ws.close(),
    onmessage: null,
    onclose: null,
    onopen: null,
  };
  ws.onmessage = (e) => t.onmessage?.(String(e.data));
  ws.onclose = () => t.onclose?.();
  ws.onopen = () => t.onopen?.();
  return t;
}

export interface SessionHandlers {
  onReady(scenario: ScenarioSummary): void;
  onFrame(frame: Frame): void;
  onError(code: string, detail: string): void;
  onClose(): void;
}

export class SessionClient {
  readonly samples: GazeSample[] = [];
  readonly events: EngineEvent[] = [];
  tickRate = 60;
  private open = false;

  constructor(
    private readonly transport: Transport,
    private readonly handlers: SessionHandlers,
    readonly scenario: string,
    readonly mode: Mode,
  ) {
    transport.onopen = () => {
      this.open = true;
      transport.send(helloMessage(scenario, mode));
    };
    transport.onmessage = (text) => this.receive(text);
    transport.onclose = () => {
      this.open = false;
      handlers.onClose();
    };
  }

  get isOpen(): boolean {
    return this.open;
  }

  private receive(text: string): void {
    const msg = parseServerMessage(text);
    if (msg.type === 'ready') {
      this.tickRate = (msg as Ready).scenario.tick_rate;
      this.handlers.onReady((msg as Ready).scenario);
    } else if (msg.type === 'frame') {
      this.events.push(...msg.events);
      this.handlers.onFrame(msg);
    } else {
      this.handlers.onError(msg.code, msg.detail);
    }
  }

  /** Send one gaze sample; it is also recorded for the trace export. */
  sendGaze(sample: GazeSample): void {
    if (!this.open) return;
    this.samples.push(sample);
    this.transport.send(gazeMessage(sample));
  }

  close(): void {
    if (this.open) this.transport.close();
    this.open = false;
  }
}
