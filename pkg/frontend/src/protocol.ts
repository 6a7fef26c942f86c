// Wire protocol shared with the session server: JSON text frames over a
// websocket. The client sends hello / gaze / reset; the server answers with
// ready / frame / error. One frame arrives per engine tick.

export type Mode = 'guided' | 'self' | 'mixed';
export const MODES: Mode[] = ['guided', 'self', 'mixed'];

export interface SphereVolume {
  center: [number, number, number];
  radius: number;
}

export interface RoiSummary {
  roi_id: number;
  label: string;
  volumes: SphereVolume[];
  highlight_triangles: number[];
}

export interface UnitSummary {
  unit_id: string;
  kind: 'audio' | 'image_set' | 'timeline' | 'reconstruction' | 'augmentation' | 'text';
  duration: number;
  transcript: string;
  asset_refs: string[];
  linked_roi: number | null;
  is_core: boolean;
}

export interface TimelineEntry {
  year: number;
  image_ref: string;
  caption: string;
}

export interface ScenarioSummary {
  id: string;
  rois: RoiSummary[];
  units: UnitSummary[];
  script: {
    intro: string;
    conclusion: string;
    roi_units: Record<string, string>;
    guided_order: number[];
    core_set: number[];
  };
  selection: {
    hover_duration: number;
    dwell_duration: number;
    exit_grace: number;
    tick: number;
  };
  timeline: { rows: { name: string; entries: TimelineEntry[] }[] } | null;
  modes: Mode[];
  tick_rate: number;
  mesh_url: string;
  virtual_triangles: number[];
}

export interface EngineEvent {
  t: number; // engine tick
  type: string;
  payload: Record<string, unknown>;
}

export interface PuckFrame {
  point: [number, number, number];
  normal: [number, number, number];
  on_surface: boolean;
}

export interface Frame {
  type: 'frame';
  t: number;
  puck: PuckFrame | null;
  gazed_roi: number | null;
  cue: number | null;
  dwell_fraction: number | null;
  events: EngineEvent[];
}

export interface Ready {
  type: 'ready';
  scenario: ScenarioSummary;
}

export interface ErrorMsg {
  type: 'error';
  code: string;
  detail: string;
}

export type ServerMessage = Ready | Frame | ErrorMsg;

export interface GazeSample {
  t: number;
  pos: [number, number, number];
  quat: [number, number, number, number]; // (w, x, y, z), unit length
}

export function helloMessage(scenario: string, mode: Mode): string {
  return JSON.stringify({ type: 'hello', scenario, mode });
}

export function resetMessage(): string {
  return JSON.stringify({ type: 'reset' });
}

export function gazeMessage(sample: GazeSample): string {
  return JSON.stringify({ type: 'gaze', t: sample.t, pos: sample.pos, quat: sample.quat });
}

export function parseServerMessage(text: string): ServerMessage {
  let obj: unknown;
  try {
    obj = JSON.parse(text);
  } catch {
    throw new Error(`unparseable server message: ${text.slice(0, 120)}`);
  }
  if (typeof obj !== 'object' || obj === null || !('type' in obj)) {
    throw new Error('server message has no type');
  }
  const msg = obj as { type: string };
  if (msg.type === 'ready' || msg.type === 'frame' || msg.type === 'error') {
    return msg as ServerMessage;
  }
  throw new Error(`unknown server message type: ${msg.type}`);
}
