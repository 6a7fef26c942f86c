// End-to-end round trip against the real session server:
//
//   1. start `gazeguide serve`, open a websocket session (self-guided)
//   2. steer the gaze through the UI's own camera/pointer model until two
//      regions are selected and delivered, recording samples and events
//      exactly as the browser client does
//   3. export the session in the trace/event file formats
//   4. replay the exported trace through the CLI and require the same
//      delivery order and the same conclusion condition
//
// Run with: npm run e2e   (needs the python package installed)

import { spawn, spawnSync } from 'node:child_process';
import { mkdtempSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import WebSocket from 'ws';

import { eventsFileText, traceFileText } from '../src/exporter';
import { GazeClock, defaultOrbit, gazeQuat, orbitEye, orbitMove } from '../src/gazecam';
import { Frame, ScenarioSummary } from '../src/protocol';
import { SessionClient, Transport } from '../src/session';

const PORT = 8930 + Math.floor(Math.random() * 60);
const BASE = `http://127.0.0.1:${PORT}`;

function fail(msg: string): never {
  console.error(`FAIL ${msg}`);
  process.exit(1);
}

function nodeTransport(url: string): Transport {
  const ws = new WebSocket(url);
  const t: Transport = {
    send: (text) => ws.send(text),
    close: () => ws.close(),
    onmessage: null,
    onclose: null,
    onopen: null,
  };
  ws.on('message', (data) => t.onmessage?.(data.toString()));
  ws.on('close', () => t.onclose?.());
  ws.on('open', () => t.onopen?.());
  return t;
}

async function waitForServer(): Promise<void> {
  for (let i = 0; i < 100; i++) {
    try {
      const resp = await fetch(`${BASE}/scenarios`);
      if (resp.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 150));
  }
  fail('server never came up');
}

async function main(): Promise<void> {
  const server = spawn('python3', ['-m', 'gazeguide.cli', 'serve', '--port', String(PORT)], {
    stdio: 'ignore',
  });
  try {
    await waitForServer();
    console.log(`server up on :${PORT}`);

    let scenario: ScenarioSummary | null = null;
    const frames: Frame[] = [];
    let closed = false;
    const client = new SessionClient(
      nodeTransport(`ws://127.0.0.1:${PORT}/session`),
      {
        onReady: (s) => (scenario = s),
        onFrame: (f) => frames.push(f),
        onError: (code, detail) => fail(`session error ${code}: ${detail}`),
        onClose: () => (closed = true),
      },
      'viktoria',
      'self',
    );

    while (scenario === null) await new Promise((r) => setTimeout(r, 50));
    const summary: ScenarioSummary = scenario;
    console.log(`ready: ${summary.rois.length} rois, ${summary.units.length} units`);

    // drive gaze exactly like the browser does: orbit + pointer, 60 Hz clock
    const clock = new GazeClock(0);
    let now = 0;
    let orbit = defaultOrbit();
    let aim: [number, number, number] | null = null; // world point to stare at

    const sendTicks = (ticks: number) => {
      for (let i = 0; i < ticks; i++) {
        now += 1000 / 60;
        if (aim) {
          orbit = { ...orbit, target: aim };
        }
        client.sendGaze({
          t: clock.sample(now),
          pos: orbitEye(orbit),
          quat: gazeQuat(orbit, 0, aim ? 0 : 0.9), // pointer high = off the statue
        });
      }
    };

    const seenEvent = (type: string, match?: (p: Record<string, unknown>) => boolean) =>
      frames.some((f) => f.events.some((e) => e.type === type && (!match || match(e.payload))));

    const waitEvent = async (type: string, match?: (p: Record<string, unknown>) => boolean) => {
      for (let i = 0; i < 600; i++) {
        if (seenEvent(type, match)) return;
        sendTicks(6);
        await new Promise((r) => setTimeout(r, 5));
      }
      fail(`never saw event ${type}`);
    };

    const gazedRecently = (roi: number) =>
      frames.slice(-10).some((f) => f.gazed_roi === roi);

    // 1. rest through the intro
    aim = null;
    await waitEvent('content_finished', (p) => p.unit === summary.script.intro);
    console.log('intro finished');

    // 2. select two regions by walking the camera around and staring
    const targets = [3, 1];
    for (const roi of targets) {
      const spec = summary.rois.find((r) => r.roi_id === roi)!;
      const center = spec.volumes[0].center;
      const baseAzimuth = Math.atan2(center[0], center[2]);
      let locked = false;
      for (const offset of [0, 0.5, -0.5, 1.0, -1.0, 1.6, -1.6, Math.PI]) {
        orbit = orbitMove(defaultOrbit(), 0, 0, 0);
        orbit = { ...orbit, azimuth: baseAzimuth + offset, target: center };
        aim = center;
        sendTicks(30); // half a second of staring from this angle
        await new Promise((r) => setTimeout(r, 20));
        if (gazedRecently(roi)) {
          locked = true;
          break;
        }
      }
      if (!locked) fail(`could not land the gaze inside roi ${roi}`);
      const unit = summary.script.roi_units[String(roi)];
      await waitEvent('content_started', (p) => p.unit === unit);
      console.log(`selected roi ${roi} -> ${unit}`);
      aim = null; // step back while the unit plays out
      await waitEvent('content_finished', (p) => p.unit === unit);
    }
    sendTicks(30);
    await new Promise((r) => setTimeout(r, 300));
    client.close();
    while (!closed) await new Promise((r) => setTimeout(r, 20));

    const liveFinished = client.events
      .filter((e) => e.type === 'content_finished')
      .map((e) => e.payload.unit);
    const liveConcluded = client.events.some((e) => e.type === 'conclusion_started');
    console.log(`live session deliveries: ${liveFinished.join(' -> ')}`);

    // 3. export in the engine file formats
    const dir = mkdtempSync(join(tmpdir(), 'gazeguide-e2e-'));
    const tracePath = join(dir, 'session.trace.jsonl');
    writeFileSync(tracePath, traceFileText(client.samples));
    writeFileSync(join(dir, 'session.events.jsonl'), eventsFileText(client.events, client.tickRate));
    console.log(`exported ${client.samples.length} samples to ${tracePath}`);

    // 4. replay through the CLI
    const demo = spawnSync('python3', ['-m', 'gazeguide.cli', 'demo', '--out', dir]);
    if (demo.status !== 0) fail('demo asset generation failed');
    const replay = spawnSync('python3', [
      '-m', 'gazeguide.cli', 'simulate', '--mode', 'self',
      '--scenario', join(dir, 'viktoria.scenario.json'),
      '--trace', tracePath,
    ], { encoding: 'utf-8' });
    if (replay.status !== 0) fail(`replay failed: ${replay.stderr}`);
    const report = JSON.parse(replay.stdout);
    const replayed = report.deliveries.map((d: { unit: string }) => d.unit);

    if (JSON.stringify(replayed) !== JSON.stringify(liveFinished)) {
      fail(`delivery order diverged: live ${liveFinished} vs replay ${replayed}`);
    }
    if (report.completion !== liveConcluded) {
      fail(`conclusion condition diverged: live ${liveConcluded} vs replay ${report.completion}`);
    }
    console.log('PASS ui-round-trip: replayed delivery order matches the live session');
    console.log(`PASS conclusion condition matches (concluded=${liveConcluded})`);
  } finally {
    server.kill();
  }
}

main().catch((err) => fail(String(err)));
