/**
 * Wire types for the session service HTTP API.
 *
 * The client renders exactly what the server sends: visible cells carry
 * their own wall and sprite flags, and nothing about unseen maze structure
 * ever reaches the browser.
 */

export type Heading = 'N' | 'E' | 'S' | 'W';

export type Action = 'forward' | 'back' | 'strafe_left' | 'turn_right';

export type PhaseKind = 'explore' | 'goal' | 'blocked';

export type SessionStatus = 'active' | 'phase_complete' | 'finished';

export interface VisibleCell {
  x: number;
  y: number;
  walls: Record<Heading, boolean>; // true = passable in that direction
  apple: boolean;
  goal: boolean;
}

export interface Avatar {
  x: number;
  y: number;
  heading: Heading;
  sub_offset: number;
}

export interface View {
  session_id: string;
  status: SessionStatus;
  experiment: number;
  condition: string;
  phase_label: string;
  phase_kind: PhaseKind;
  phase_index: number;
  phase_count: number;
  banner: string;
  maze: { width: number; height: number };
  avatar: Avatar;
  on_goal: boolean;
  visible: VisibleCell[];
  transitions: number;
  budget: number;
  consumed: number[][];
  collided: boolean;
}

export interface PhaseSummary {
  label: string;
  outcome: string | null;
  transitions: number;
  coverage: number | null;
  steps_to_goal: number | null;
  cells_crossed: number;
  duration_ms: number;
}

export interface ExportDocument {
  session_id: string;
  experiment: number;
  condition: string;
  phases_completed: Array<{
    label: string;
    outcome: string | null;
    incomplete: boolean;
    transitions: number;
    duration_ms: number;
    summary?: {
      coverage: number;
      steps_to_goal: number | null;
      cells_crossed: number;
      re_exploration: number;
    };
  }>;
}
