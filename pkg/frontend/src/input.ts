/**
 * Keyboard mapping and the single-flight action dispatcher.
 *
 * Arrow keys map to the four simulator actions; every other key is ignored.
 * Only one action may be in flight at a time: key events arriving while a
 * request is pending are dropped (not queued), so key auto-repeat can never
 * build up a backlog of moves the player did not intend.
 */

import type { Action } from './types.js';

const KEY_MAP: Record<string, Action> = {
  ArrowUp: 'forward',
  ArrowDown: 'back',
  ArrowLeft: 'strafe_left',
  ArrowRight: 'turn_right',
};

export function keyToAction(key: string): Action | null {
  return KEY_MAP[key] ?? null;
}

export type DispatchResult = 'sent' | 'dropped';

export class ActionDispatcher {
  private inFlight = false;

  get busy(): boolean {
    return this.inFlight;
  }

  /**
   * Run `send` for this action unless another action is already in flight.
   * Resolves to 'dropped' without calling `send` when busy.
   */
  async dispatch(action: Action, send: (action: Action) => Promise<void>): Promise<DispatchResult> {
    if (this.inFlight) {
      return 'dropped';
    }
    this.inFlight = true;
    try {
      await send(action);
    } finally {
      this.inFlight = false;
    }
    return 'sent';
  }
}
