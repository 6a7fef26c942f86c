// Session export in the engine's JSON-lines file formats, so a recorded
// browser session replays through the CLI (`gazeguide simulate --trace`).

import { EngineEvent, GazeSample } from './protocol';

export function traceFileText(samples: GazeSample[]): string {
  const lines = ['{"version":1,"kind":"trace"}'];
  let last = -Infinity;
  for (const s of samples) {
    if (s.t <= last) throw new Error(`trace timestamps must increase (${s.t} after ${last})`);
    last = s.t;
    lines.push(JSON.stringify({ t: s.t, pos: s.pos, quat: s.quat }));
  }
  return lines.join('\n') + '\n';
}

export function eventsFileText(events: EngineEvent[], tickRate: number): string {
  const lines = [JSON.stringify({ version: 1, kind: 'events', tick_rate: tickRate })];
  for (const e of events) {
    lines.push(JSON.stringify({ t: e.t, type: e.type, payload: e.payload }));
  }
  return lines.join('\n') + '\n';
}

export function download(filename: string, text: string): void {
  const blob = new Blob([text], { type: 'application/jsonl' });
  const url = URL.createObjectURL(blob);
  const a = document.createElement('a');
  a.href = url;
  a.download = filename;
  a.click();
  URL.revokeObjectURL(url);
}
