/**
 * Session flow controller: create or resume a session, run its phases with
 * instruction interstitials, advance between phases, and finish with the
 * summary fetched from the export endpoint.
 *
 * The controller owns no DOM; a Screen implementation renders scenes and
 * asks the player to confirm interstitials, retries, and summaries. All
 * server interaction is single-flight: moves the player mashes while a
 * request is pending are dropped.
 */

import { ApiError, type CreateSessionRequest, type SessionApi } from './api.js';
import { ActionDispatcher, keyToAction } from './input.js';
import { buildScene, type Scene } from './scene.js';
import { applyView, emptyModel, type ViewModel } from './state.js';
import type { ExportDocument, View } from './types.js';

export interface Screen {
  renderScene(scene: Scene): void;
  /** Resolves when the player dismisses the interstitial. */
  showInterstitial(banner: string, phaseIndex: number, phaseCount: number): Promise<void>;
  showSummary(doc: ExportDocument): void;
  /** Resolves true to retry the failed request. */
  showError(message: string): Promise<boolean>;
}

export interface SessionStorageLike {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

const STORAGE_KEY = 'explab-session-id';

export type KeyResult = 'sent' | 'dropped' | 'ignored' | 'inactive';

export class SessionController {
  model: ViewModel = emptyModel();
  private dispatcher = new ActionDispatcher();

  constructor(
    private client: SessionApi,
    private screen: Screen,
    private storage: SessionStorageLike,
  ) {}

  /** True while an action request is on the wire. */
  get pending(): boolean {
    return this.dispatcher.busy;
  }

  /** Create a new session, or resume the tab's session after a refresh. */
  async start(request: CreateSessionRequest): Promise<void> {
    const existing = this.storage.getItem(STORAGE_KEY);
    let view: View | null = null;
    if (existing) {
      try {
        view = await this.retrying(() => this.client.getSession(existing));
      } catch (err) {
        if (!(err instanceof ApiError) || err.status !== 404) throw err;
        this.storage.removeItem(STORAGE_KEY);
      }
    }
    if (view === null) {
      view = await this.retrying(() => this.client.createSession(request));
      this.storage.setItem(STORAGE_KEY, view.session_id);
      this.apply(view);
      await this.screen.showInterstitial(view.banner, view.phase_index,
        view.phase_count);
    } else {
      this.apply(view);
    }
    this.render();
    if (this.model.status !== 'active') {
      await this.afterPhaseComplete();
    }
  }

  /** Route one keyboard event; extra keys while a move is pending drop. */
  async handleKey(key: string): Promise<KeyResult> {
    if (this.model.status !== 'active') {
      return 'inactive';
    }
    const action = keyToAction(key);
    if (action === null) {
      return 'ignored';
    }
    const result = await this.dispatcher.dispatch(action, async (a) => {
      const view = await this.retrying(
        () => this.client.submitAction(this.model.sessionId, a));
      this.apply(view);
      this.render();
    });
    const after: ViewModel = this.model;  // dispatch may have replaced it
    if (result === 'sent' && after.status === 'phase_complete') {
      await this.afterPhaseComplete();
    }
    return result;
  }

  /** End a free-exploration phase early (the "done exploring" control). */
  async finishExploring(): Promise<void> {
    if (this.model.status !== 'active') return;
    const view = await this.retrying(
      () => this.client.submitAction(this.model.sessionId, 'done'));
    this.apply(view);
    this.render();
    await this.afterPhaseComplete();
  }

  private async afterPhaseComplete(): Promise<void> {
    if (this.model.status === 'phase_complete') {
      // The interstitial is the advance control: celebrate (or close out)
      // the finished phase, and only move on once the player confirms.
      const message = this.model.onGoal ? 'You found it!' : 'Phase complete.';
      await this.screen.showInterstitial(message, this.model.phaseIndex,
        this.model.phaseCount);
      const view = await this.retrying(
        () => this.client.advance(this.model.sessionId));
      this.apply(view);
      this.render();
    }
    if (this.model.status === 'finished') {
      const doc = await this.retrying(
        () => this.client.exportSession(this.model.sessionId));
      this.screen.showSummary(doc);
    }
  }

  private apply(view: View): void {
    this.model = applyView(this.model, view);
  }

  private render(): void {
    this.screen.renderScene(buildScene(this.model));
  }

  /** Retry prompt loop for network failures; the session id is never lost. */
  private async retrying<T>(call: () => Promise<T>): Promise<T> {
    for (;;) {
      try {
        return await call();
      } catch (err) {
        if (err instanceof ApiError && err.status === 0) {
          const retry = await this.screen.showError(err.message);
          if (retry) continue;
        }
        throw err;
      }
    }
  }
}

/** Attach the arrow-key handler the way the page does. */
export function wireKeyboard(target: EventTarget, controller: SessionController): void {
  target.addEventListener('keydown', (event) => {
    const key = (event as KeyboardEvent).key;
    void controller.handleKey(key);
    if (key.startsWith('Arrow')) {
      event.preventDefault();
    }
  });
}
