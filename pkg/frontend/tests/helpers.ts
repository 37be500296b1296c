/** Shared fakes: a recording in-memory service and a no-op screen. */

import type { CreateSessionRequest, SessionApi } from '../src/api.js';
import type { Screen } from '../src/app.js';
import type { Action, ExportDocument, View, VisibleCell } from '../src/types.js';

export function cell(x: number, y: number, extra: Partial<VisibleCell> = {}): VisibleCell {
  return {
    x, y,
    walls: { N: false, E: false, S: false, W: false },
    apple: false,
    goal: false,
    ...extra,
  };
}

export function baseView(overrides: Partial<View> = {}): View {
  return {
    session_id: 'sess-1',
    status: 'active',
    experiment: 1,
    condition: 'standard',
    phase_label: 'A',
    phase_kind: 'explore',
    phase_index: 1,
    phase_count: 3,
    banner: 'Explore freely.',
    maze: { width: 5, height: 4 },
    avatar: { x: 1, y: 1, heading: 'N', sub_offset: 0 },
    on_goal: false,
    visible: [cell(1, 1)],
    transitions: 0,
    budget: 100,
    consumed: [],
    collided: false,
    ...overrides,
  };
}

/**
 * Minimal in-memory stand-in for the session service: it records every
 * action in arrival order and echoes active views.
 */
export class RecordingService implements SessionApi {
  actions: Array<Action | 'done'> = [];
  advances = 0;
  created: CreateSessionRequest | null = null;

  async createSession(req: CreateSessionRequest): Promise<View> {
    this.created = req;
    return baseView();
  }

  async getSession(): Promise<View> {
    return baseView({ transitions: this.actions.length });
  }

  async submitAction(_sid: string, action: Action | 'done'): Promise<View> {
    this.actions.push(action);
    return baseView({ transitions: this.actions.length });
  }

  async advance(): Promise<View> {
    this.advances += 1;
    return baseView({ phase_label: 'B', phase_kind: 'goal', phase_index: 2 });
  }

  async exportSession(): Promise<ExportDocument> {
    return { session_id: 'sess-1', experiment: 1, condition: 'standard',
             phases_completed: [] };
  }
}

export class AutoScreen implements Screen {
  scenes: unknown[] = [];
  interstitials: string[] = [];
  summaries: ExportDocument[] = [];

  renderScene(scene: unknown): void {
    this.scenes.push(scene);
  }

  async showInterstitial(banner: string): Promise<void> {
    this.interstitials.push(banner);
  }

  showSummary(doc: ExportDocument): void {
    this.summaries.push(doc);
  }

  async showError(): Promise<boolean> {
    return false;
  }
}

export class MapStorage {
  private map = new Map<string, string>();

  getItem(key: string): string | null {
    return this.map.get(key) ?? null;
  }

  setItem(key: string, value: string): void {
    this.map.set(key, value);
  }

  removeItem(key: string): void {
    this.map.delete(key);
  }
}
