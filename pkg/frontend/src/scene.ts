/**
 * Scene construction: turn the view model into a flat list of draw
 * operations. Pure data in, pure data out, so the fog-of-war rules can be
 * tested without a canvas; paint.ts turns a Scene into pixels.
 */

import { cellKey, type ViewModel } from './state.js';
import type { Heading } from './types.js';

export interface TileOp {
  x: number;
  y: number;
  kind: 'unrevealed' | 'floor';
}

export interface WallOp {
  x: number;
  y: number;
  side: Heading;
}

export interface SpriteOp {
  x: number;
  y: number;
  kind: 'avatar' | 'apple' | 'goal';
  heading?: Heading;
}

export interface Scene {
  width: number;
  height: number;
  tiles: TileOp[];
  walls: WallOp[];
  sprites: SpriteOp[];
  banner: string;
  statusLine: string;
  phaseKind: string;
  blockedIndicator: { x: number; y: number; side: Heading } | null;
  celebration: boolean;
}

/** Build the draw list. Only server-revealed cells ever produce ops. */
export function buildScene(model: ViewModel): Scene {
  const tiles: TileOp[] = [];
  const walls: WallOp[] = [];
  const sprites: SpriteOp[] = [];

  for (let y = 0; y < model.height; y++) {
    for (let x = 0; x < model.width; x++) {
      const cell = model.revealed.get(cellKey(x, y));
      if (!cell) {
        tiles.push({ x, y, kind: 'unrevealed' });
        continue;
      }
      tiles.push({ x, y, kind: 'floor' });
      for (const side of ['N', 'E', 'S', 'W'] as Heading[]) {
        if (!cell.walls[side]) {
          walls.push({ x, y, side });
        }
      }
      if (cell.apple) {
        sprites.push({ x, y, kind: 'apple' });
      }
      if (cell.goal) {
        sprites.push({ x, y, kind: 'goal' });
      }
    }
  }
  sprites.push({
    x: model.avatar.x,
    y: model.avatar.y,
    kind: 'avatar',
    heading: model.avatar.heading,
  });

  return {
    width: model.width,
    height: model.height,
    tiles,
    walls,
    sprites,
    banner: model.banner,
    statusLine: statusLine(model),
    phaseKind: model.phaseKind,
    blockedIndicator: model.lastCollided
      ? { x: model.avatar.x, y: model.avatar.y, side: model.avatar.heading }
      : null,
    celebration: model.onGoal && model.status === 'phase_complete',
  };
}

function statusLine(model: ViewModel): string {
  const phase = `phase ${model.phaseIndex}/${model.phaseCount}`;
  const moves = `${model.transitions}/${model.budget} moves`;
  if (model.status === 'finished') {
    return 'session finished';
  }
  if (model.status === 'phase_complete') {
    return `${phase} complete`;
  }
  return `${phase} | ${moves}`;
}
