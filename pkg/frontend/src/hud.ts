// DOM overlay: mode picker, dwell ring, content panel, event console,
// connection banner, export buttons. Pure presentation over the ViewState.

import { Mode, MODES } from './protocol';
import { ViewState } from './viewstate';

export interface HudCallbacks {
  onMode(mode: Mode): void;
  onReset(): void;
  onExport(): void;
}

export class Hud {
  private ring: HTMLCanvasElement;
  private panel: HTMLElement;
  private consoleEl: HTMLElement;
  private banner: HTMLElement;
  private status: HTMLElement;
  private modeButtons = new Map<Mode, HTMLButtonElement>();
  private lastConsoleLength = 0;
  private lastUnit: string | null = null;

  constructor(root: HTMLElement, callbacks: HudCallbacks) {
    const bar = document.createElement('div');
    bar.className = 'topbar';
    for (const mode of MODES) {
      const b = document.createElement('button');
      b.textContent = mode === 'self' ? 'self-guided' : mode;
      b.onclick = () => callbacks.onMode(mode);
      this.modeButtons.set(mode, b);
      bar.appendChild(b);
    }
    const reset = document.createElement('button');
    reset.textContent = 'reset';
    reset.onclick = () => callbacks.onReset();
    const exportBtn = document.createElement('button');
    exportBtn.textContent = 'export trace';
    exportBtn.onclick = () => callbacks.onExport();
    this.status = document.createElement('span');
    this.status.className = 'status';
    bar.append(reset, exportBtn, this.status);
    root.appendChild(bar);

    this.ring = document.createElement('canvas');
    this.ring.className = 'ring';
    root.appendChild(this.ring);

    this.panel = document.createElement('div');
    this.panel.className = 'panel hidden';
    root.appendChild(this.panel);

    this.consoleEl = document.createElement('div');
    this.consoleEl.className = 'console';
    root.appendChild(this.consoleEl);

    this.banner = document.createElement('div');
    this.banner.className = 'banner hidden';
    this.banner.textContent = 'connection lost - input paused';
    root.appendChild(this.banner);
  }

  setConnected(connected: boolean): void {
    this.banner.classList.toggle('hidden', connected);
  }

  setActiveMode(mode: Mode): void {
    for (const [m, b] of this.modeButtons) b.classList.toggle('active', m === mode);
  }

  resize(width: number, height: number): void {
    this.ring.width = width;
    this.ring.height = height;
  }

  render(state: ViewState, puckScreen: { x: number; y: number; behind: boolean } | null): void {
    const tickRate = state.scenario?.tick_rate ?? 60;
    this.status.textContent =
      `t=${(state.tick / tickRate).toFixed(1)}s` +
      (state.cue !== null ? `  cue: roi ${state.cue}` : '') +
      (state.sessionDone ? '  session complete' : '');

    this.drawRing(state, puckScreen);
    this.renderPanel(state);
    this.renderConsole(state);
  }

  private drawRing(state: ViewState, puckScreen: { x: number; y: number; behind: boolean } | null): void {
    const ctx = this.ring.getContext('2d')!;
    ctx.clearRect(0, 0, this.ring.width, this.ring.height);
    if (state.dwellFraction === null || !puckScreen || puckScreen.behind) return;
    const x = (puckScreen.x * 0.5 + 0.5) * this.ring.width;
    const y = (-puckScreen.y * 0.5 + 0.5) * this.ring.height;
    const radius = 34;
    ctx.lineWidth = 5;
    ctx.strokeStyle = 'rgba(180, 210, 255, 0.25)';
    ctx.beginPath();
    ctx.arc(x, y, radius, 0, Math.PI * 2);
    ctx.stroke();
    ctx.strokeStyle = 'rgba(140, 220, 255, 0.95)';
    ctx.beginPath();
    ctx.arc(x, y, radius, -Math.PI / 2, -Math.PI / 2 + state.dwellFraction * Math.PI * 2);
    ctx.stroke();
  }

  private renderPanel(state: ViewState): void {
    const unit = state.playingUnit;
    const unitId = unit?.unit_id ?? null;
    if (unitId === this.lastUnit) return;
    this.lastUnit = unitId;
    this.panel.classList.toggle('hidden', unit === null);
    if (!unit) return;
    this.panel.innerHTML = '';
    const title = document.createElement('h2');
    title.textContent = `${unit.unit_id} (${unit.kind})`;
    const body = document.createElement('p');
    body.textContent = unit.transcript;
    this.panel.append(title, body);
    if (unit.kind === 'image_set') {
      const grid = document.createElement('div');
      grid.className = 'imagegrid';
      for (let i = 0; i < 4; i++) {
        const cell = document.createElement('div');
        cell.textContent = unit.asset_refs[0] ? `${unit.asset_refs[0]}#${i + 1}` : `image ${i + 1}`;
        grid.appendChild(cell);
      }
      this.panel.appendChild(grid);
    }
    if (unit.kind === 'timeline') {
      const note = document.createElement('p');
      note.className = 'hint';
      note.textContent = 'the timeline unrolls behind the statue';
      this.panel.appendChild(note);
    }
    if (unit.kind === 'reconstruction') {
      const note = document.createElement('p');
      note.className = 'hint';
      note.textContent = 'the floor drops: the figure stands in its old hall';
      this.panel.appendChild(note);
    }
  }

  private renderConsole(state: ViewState): void {
    if (state.console.length === this.lastConsoleLength) return;
    this.lastConsoleLength = state.console.length;
    const tickRate = state.scenario?.tick_rate ?? 60;
    this.consoleEl.innerHTML = '';
    for (const line of state.console.slice(-12)) {
      const div = document.createElement('div');
      div.textContent = `${(line.t / tickRate).toFixed(2)}s  ${line.text}`;
      this.consoleEl.appendChild(div);
    }
    this.consoleEl.scrollTop = this.consoleEl.scrollHeight;
  }
}
