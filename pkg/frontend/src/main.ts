/**
 * Boot: wire the controller to the page.
 *
 * Query parameters select the plan: ?experiment=1|2&condition=dense|sparse
 * &subject=p01. The client talks to the origin that served it, so running
 * `explab serve --static-dir frontend` is all a play session needs.
 */

import { SessionClient } from './api.js';
import { SessionController, wireKeyboard, type Screen } from './app.js';
import { paintScene } from './paint.js';
import type { Scene } from './scene.js';
import type { ExportDocument } from './types.js';

const canvas = document.getElementById('maze') as HTMLCanvasElement;
const ctx = canvas.getContext('2d')!;
const bannerEl = document.getElementById('banner')!;
const statusEl = document.getElementById('status')!;
const overlayEl = document.getElementById('overlay')!;
const overlayTextEl = document.getElementById('overlay-text')!;
const overlayButton = document.getElementById('overlay-button') as HTMLButtonElement;
const doneButton = document.getElementById('done-button') as HTMLButtonElement;

function fitCanvas(): void {
  canvas.width = canvas.clientWidth;
  canvas.height = canvas.clientHeight;
}
window.addEventListener('resize', fitCanvas);
fitCanvas();

let lastScene: Scene | null = null;

function overlayPrompt(text: string, button: string): Promise<void> {
  overlayTextEl.textContent = text;
  overlayButton.textContent = button;
  overlayEl.classList.remove('hidden');
  return new Promise((resolve) => {
    overlayButton.onclick = () => {
      overlayEl.classList.add('hidden');
      resolve();
    };
  });
}

const screen: Screen = {
  renderScene(scene: Scene): void {
    lastScene = scene;
    bannerEl.textContent = scene.celebration ? 'You found it!' : scene.banner;
    statusEl.textContent = scene.statusLine;
    doneButton.classList.toggle('hidden', scene.phaseKind !== 'explore');
    paintScene(ctx, scene);
  },
  async showInterstitial(banner, phaseIndex, phaseCount): Promise<void> {
    await overlayPrompt(`Part ${phaseIndex} of ${phaseCount}: ${banner}`, 'Start');
  },
  showSummary(doc: ExportDocument): void {
    const lines = doc.phases_completed.map((p) => {
      const coverage = p.summary ? `${Math.round(p.summary.coverage * 100)}% explored` : '';
      const steps = p.summary && p.summary.steps_to_goal !== null
        ? `, goal in ${p.summary.steps_to_goal} moves` : '';
      return `Part ${p.label}: ${p.transitions} moves, ${coverage}${steps}`;
    });
    overlayTextEl.textContent = `All done! ${lines.join(' | ')}`;
    overlayButton.classList.add('hidden');
    overlayEl.classList.remove('hidden');
  },
  async showError(message: string): Promise<boolean> {
    await overlayPrompt(`Connection trouble: ${message}`, 'Retry');
    return true;
  },
};

const params = new URLSearchParams(window.location.search);
const controller = new SessionController(new SessionClient(''), screen,
  window.sessionStorage);

wireKeyboard(window, controller);

doneButton.onclick = () => void controller.finishExploring();

void controller.start({
  experiment: Number(params.get('experiment') ?? '1'),
  condition: params.get('condition') ?? undefined,
  subject: params.get('subject') ?? 'anonymous',
}).catch((err) => {
  overlayTextEl.textContent = `Could not start a session: ${err}`;
  overlayButton.classList.add('hidden');
  overlayEl.classList.remove('hidden');
});

export { lastScene };
