// The single source of render truth. The view holds no mediation logic of
// its own: every cue, highlight, dwell fraction, and content change below is
// copied straight out of server frames.

import {
  EngineEvent,
  Frame,
  PuckFrame,
  ScenarioSummary,
  UnitSummary,
} from './protocol';

export interface ConsoleLine {
  t: number;
  text: string;
}

export interface ViewState {
  scenario: ScenarioSummary | null;
  tick: number;
  puck: PuckFrame | null;
  gazedRoi: number | null;
  cue: number | null;
  dwellFraction: number | null;
  hoveringRoi: number | null; // puck-local particles while set
  highlightedRoi: number | null; // full-roi particles (hover matured or cue)
  playingUnit: UnitSummary | null;
  sessionDone: boolean;
  console: ConsoleLine[];
  eventsSeen: EngineEvent[];
}

export function initialViewState(): ViewState {
  return {
    scenario: null,
    tick: 0,
    puck: null,
    gazedRoi: null,
    cue: null,
    dwellFraction: null,
    hoveringRoi: null,
    highlightedRoi: null,
    playingUnit: null,
    sessionDone: false,
    console: [],
    eventsSeen: [],
  };
}

const CONSOLE_LIMIT = 200;

function describe(e: EngineEvent): string {
  const p = e.payload as Record<string, unknown>;
  switch (e.type) {
    case 'gaze_entered_roi': return `gaze entered roi ${p.roi}`;
    case 'gaze_exited_roi': return `gaze left roi ${p.roi}`;
    case 'roi_highlighted': return `roi ${p.roi} highlighted`;
    case 'dwell_started': return `dwell timer started on roi ${p.roi}`;
    case 'selection_confirmed': return `roi ${p.roi} selected`;
    case 'particles_cleared': return 'particles cleared';
    case 'content_started': return `content started: ${p.unit}`;
    case 'content_finished': return `content finished: ${p.unit}`;
    case 'system_cue_shown': return `system cues roi ${p.roi}`;
    case 'system_cue_withdrawn': return `system cue on roi ${p.roi} withdrawn`;
    case 'initiative_switched': return `initiative now with the ${p.holder}`;
    case 'conclusion_started': return 'conclusion';
    case 'session_completed': return 'session completed';
    default: return e.type;
  }
}

function findUnit(scenario: ScenarioSummary | null, unitId: string): UnitSummary | null {
  if (!scenario) return null;
  return scenario.units.find((u) => u.unit_id === unitId) ?? null;
}

export function applyReady(state: ViewState, scenario: ScenarioSummary): ViewState {
  const fresh = initialViewState();
  fresh.scenario = scenario;
  fresh.console = [{ t: 0, text: `scenario '${scenario.id}' ready` }];
  return fresh;
}

/** Fold one server frame into the view state (pure). */
export function applyFrame(state: ViewState, frame: Frame): ViewState {
  const next: ViewState = {
    ...state,
    tick: frame.t,
    puck: frame.puck,
    gazedRoi: frame.gazed_roi,
    cue: frame.cue,
    dwellFraction: frame.dwell_fraction,
    console: state.console,
    eventsSeen: state.eventsSeen.concat(frame.events),
  };
  let consoleLines = state.console;
  for (const e of frame.events) {
    if (e.type !== 'dwell_progress') {
      consoleLines = consoleLines.concat({ t: e.t, text: describe(e) });
    }
    switch (e.type) {
      case 'gaze_entered_roi':
        next.hoveringRoi = e.payload.roi as number;
        break;
      case 'gaze_exited_roi':
        if (next.hoveringRoi === e.payload.roi) next.hoveringRoi = null;
        if (next.highlightedRoi === e.payload.roi) next.highlightedRoi = null;
        break;
      case 'roi_highlighted':
      case 'system_cue_shown':
        next.highlightedRoi = e.payload.roi as number;
        break;
      case 'system_cue_withdrawn':
        if (next.highlightedRoi === e.payload.roi) next.highlightedRoi = null;
        break;
      case 'particles_cleared':
        next.hoveringRoi = null;
        next.highlightedRoi = null;
        break;
      case 'content_started':
        next.playingUnit = findUnit(state.scenario, e.payload.unit as string);
        break;
      case 'content_finished':
        if (next.playingUnit && next.playingUnit.unit_id === e.payload.unit) {
          next.playingUnit = null;
        }
        break;
      case 'session_completed':
        next.sessionDone = true;
        break;
    }
  }
  if (consoleLines.length > CONSOLE_LIMIT) {
    consoleLines = consoleLines.slice(consoleLines.length - CONSOLE_LIMIT);
  }
  next.console = consoleLines;
  return next;
}
