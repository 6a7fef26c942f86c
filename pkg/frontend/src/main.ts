// Wiring: fetch the scenario, open the session, pump 60 Hz gaze from the
// pointer-and-orbit rig, fold frames into the ViewState, render.

import { download, eventsFileText, traceFileText } from './exporter';
import { GazeClock, defaultOrbit, gazeQuat, orbitEye, orbitMove } from './gazecam';
import { Hud } from './hud';
import { parseObjSubset } from './objparse';
import { Frame, Mode, ScenarioSummary } from './protocol';
import { SessionClient, websocketTransport } from './session';
import { Stage } from './scene3d';
import { ViewState, applyFrame, applyReady, initialViewState } from './viewstate';

const canvas = document.getElementById('view') as HTMLCanvasElement;
const overlay = document.getElementById('overlay') as HTMLElement;

let state: ViewState = initialViewState();
let orbit = defaultOrbit();
let pointer = { x: 0, y: 0 };
let session: SessionClient | null = null;
let mode: Mode = 'self';
let gazeTimer: number | null = null;

const stage = new Stage(canvas);
const hud = new Hud(overlay, {
  onMode(next) {
    mode = next;
    reconnect();
  },
  onReset() {
    reconnect();
  },
  onExport() {
    if (!session) return;
    download(`session-${mode}.trace.jsonl`, traceFileText(session.samples));
    download(`session-${mode}.events.jsonl`, eventsFileText(session.events, session.tickRate));
  },
});

function resize(): void {
  const w = window.innerWidth;
  const h = window.innerHeight;
  stage.resize(w, h);
  hud.resize(w, h);
}
window.addEventListener('resize', resize);
resize();

// --- input: pointer nudges the gaze, drag + WASD orbit the camera ----------

let dragging = false;
let dragLast = { x: 0, y: 0 };
canvas.addEventListener('pointerdown', (e) => {
  dragging = true;
  dragLast = { x: e.clientX, y: e.clientY };
});
window.addEventListener('pointerup', () => (dragging = false));
window.addEventListener('pointermove', (e) => {
  pointer.x = (e.clientX / window.innerWidth) * 2 - 1;
  pointer.y = -((e.clientY / window.innerHeight) * 2 - 1);
  if (dragging) {
    orbit = orbitMove(
      orbit,
      -(e.clientX - dragLast.x) * 0.005,
      (e.clientY - dragLast.y) * 0.003,
      0,
    );
    dragLast = { x: e.clientX, y: e.clientY };
  }
});
window.addEventListener('wheel', (e) => {
  orbit = orbitMove(orbit, 0, 0, e.deltaY * 0.002);
});

const keys = new Set<string>();
window.addEventListener('keydown', (e) => keys.add(e.key.toLowerCase()));
window.addEventListener('keyup', (e) => keys.delete(e.key.toLowerCase()));

function stepKeys(): void {
  const turn = 0.035;
  if (keys.has('a')) orbit = orbitMove(orbit, turn, 0, 0);
  if (keys.has('d')) orbit = orbitMove(orbit, -turn, 0, 0);
  if (keys.has('w')) orbit = orbitMove(orbit, 0, 0, -0.05);
  if (keys.has('s')) orbit = orbitMove(orbit, 0, 0, 0.05);
  if (keys.has('q')) orbit = orbitMove(orbit, 0, turn * 0.6, 0);
  if (keys.has('e')) orbit = orbitMove(orbit, 0, -turn * 0.6, 0);
}

// --- session ---------------------------------------------------------------

function connect(): void {
  const proto = location.protocol === 'https:' ? 'wss' : 'ws';
  const transport = websocketTransport(`${proto}://${location.host}/session`);
  const clock = new GazeClock(performance.now());
  session = new SessionClient(
    transport,
    {
      onReady(scenario: ScenarioSummary) {
        state = applyReady(state, scenario);
        hud.setActiveMode(mode);
        hud.setConnected(true);
        void loadStatue(scenario);
        startGaze(clock);
      },
      onFrame(frame: Frame) {
        state = applyFrame(state, frame);
      },
      onError(code, detail) {
        console.error('session error', code, detail);
        hud.setConnected(false);
        stopGaze();
      },
      onClose() {
        hud.setConnected(false);
        stopGaze();
      },
    },
    'viktoria',
    mode,
  );
}

function reconnect(): void {
  stopGaze();
  session?.close();
  connect();
}

async function loadStatue(scenario: ScenarioSummary): Promise<void> {
  const text = await (await fetch(scenario.mesh_url)).text();
  stage.setStatue(parseObjSubset(text), scenario);
}

function startGaze(clock: GazeClock): void {
  stopGaze();
  gazeTimer = window.setInterval(() => {
    if (!session || !session.isOpen) return;
    stepKeys();
    const eye = orbitEye(orbit);
    session.sendGaze({
      t: clock.sample(performance.now()),
      pos: eye,
      quat: gazeQuat(orbit, pointer.x, pointer.y),
    });
  }, 1000 / 60);
}

function stopGaze(): void {
  if (gazeTimer !== null) {
    clearInterval(gazeTimer);
    gazeTimer = null;
  }
}

function loop(): void {
  const puckScreen = state.puck ? stage.project(state.puck.point) : null;
  stage.render(state, orbit);
  hud.render(state, puckScreen);
  requestAnimationFrame(loop);
}

connect();
requestAnimationFrame(loop);
