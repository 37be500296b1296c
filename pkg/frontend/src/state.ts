/**
 * Client view model: accumulated fog-of-war over server views.
 *
 * The revealed set only ever grows within a phase and resets when a new
 * phase starts. Cell contents (walls, apple, goal flags) refresh from the
 * latest server data for cells currently in line of sight, so a consumed
 * apple disappears from the map.
 */

import type { Avatar, SessionStatus, View, VisibleCell } from './types.js';

export interface ViewModel {
  sessionId: string;
  status: SessionStatus;
  phaseLabel: string;
  phaseKind: string;
  phaseIndex: number;
  phaseCount: number;
  banner: string;
  width: number;
  height: number;
  avatar: Avatar;
  onGoal: boolean;
  transitions: number;
  budget: number;
  revealed: Map<string, VisibleCell>;
  lastCollided: boolean;
}

export function cellKey(x: number, y: number): string {
  return `${x},${y}`;
}

export function emptyModel(): ViewModel {
  return {
    sessionId: '',
    status: 'active',
    phaseLabel: '',
    phaseKind: '',
    phaseIndex: 0,
    phaseCount: 0,
    banner: '',
    width: 0,
    height: 0,
    avatar: { x: 0, y: 0, heading: 'N', sub_offset: 0 },
    onGoal: false,
    transitions: 0,
    budget: 0,
    revealed: new Map(),
    lastCollided: false,
  };
}

/** Merge one server view into the model, resetting the fog on phase change. */
export function applyView(model: ViewModel, view: View): ViewModel {
  const samePhase = model.phaseLabel === view.phase_label &&
    model.sessionId === view.session_id;
  const revealed = samePhase ? new Map(model.revealed) : new Map<string, VisibleCell>();
  for (const cell of view.visible) {
    revealed.set(cellKey(cell.x, cell.y), cell);
  }
  return {
    sessionId: view.session_id,
    status: view.status,
    phaseLabel: view.phase_label,
    phaseKind: view.phase_kind,
    phaseIndex: view.phase_index,
    phaseCount: view.phase_count,
    banner: view.banner,
    width: view.maze.width,
    height: view.maze.height,
    avatar: view.avatar,
    onGoal: view.on_goal,
    transitions: view.transitions,
    budget: view.budget,
    revealed,
    lastCollided: view.collided === true,
  };
}
