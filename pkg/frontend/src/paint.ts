/**
 * Canvas painter: draws a Scene as top-down tiles.
 *
 * Unrevealed cells stay dark; revealed floor is light with walls drawn on
 * impassable edges; the avatar is a heading triangle; apples and the goal
 * only exist as draw calls when the scene carries them.
 */

import type { Scene, SpriteOp, WallOp } from './scene.js';
import type { Heading } from './types.js';

const COLORS = {
  unrevealed: '#14141c',
  floor: '#d8d2c0',
  wall: '#3a3a48',
  avatar: '#2266dd',
  apple: '#d0342c',
  goal: '#22aa55',
  blocked: '#ff5533',
};

export function paintScene(ctx: CanvasRenderingContext2D, scene: Scene): void {
  const canvas = ctx.canvas;
  if (scene.width === 0 || scene.height === 0) return;
  const tile = Math.floor(Math.min(canvas.width / scene.width,
    canvas.height / scene.height));
  const ox = Math.floor((canvas.width - tile * scene.width) / 2);
  const oy = Math.floor((canvas.height - tile * scene.height) / 2);

  ctx.fillStyle = COLORS.unrevealed;
  ctx.fillRect(0, 0, canvas.width, canvas.height);

  for (const t of scene.tiles) {
    ctx.fillStyle = t.kind === 'floor' ? COLORS.floor : COLORS.unrevealed;
    ctx.fillRect(ox + t.x * tile, oy + t.y * tile, tile, tile);
  }
  ctx.strokeStyle = COLORS.wall;
  ctx.lineWidth = Math.max(2, tile / 8);
  for (const w of scene.walls) {
    drawEdge(ctx, ox, oy, tile, w);
  }
  for (const sprite of scene.sprites) {
    drawSprite(ctx, ox, oy, tile, sprite);
  }
  if (scene.blockedIndicator) {
    ctx.strokeStyle = COLORS.blocked;
    ctx.lineWidth = Math.max(3, tile / 6);
    drawEdge(ctx, ox, oy, tile, scene.blockedIndicator);
  }
}

function drawEdge(ctx: CanvasRenderingContext2D, ox: number, oy: number,
                  tile: number, w: WallOp): void {
  const x = ox + w.x * tile;
  const y = oy + w.y * tile;
  ctx.beginPath();
  switch (w.side) {
    case 'N': ctx.moveTo(x, y); ctx.lineTo(x + tile, y); break;
    case 'S': ctx.moveTo(x, y + tile); ctx.lineTo(x + tile, y + tile); break;
    case 'W': ctx.moveTo(x, y); ctx.lineTo(x, y + tile); break;
    case 'E': ctx.moveTo(x + tile, y); ctx.lineTo(x + tile, y + tile); break;
  }
  ctx.stroke();
}

function drawSprite(ctx: CanvasRenderingContext2D, ox: number, oy: number,
                    tile: number, sprite: SpriteOp): void {
  const cx = ox + sprite.x * tile + tile / 2;
  const cy = oy + sprite.y * tile + tile / 2;
  const r = tile * 0.3;
  if (sprite.kind === 'apple') {
    ctx.fillStyle = COLORS.apple;
    ctx.beginPath();
    ctx.arc(cx, cy, r * 0.6, 0, Math.PI * 2);
    ctx.fill();
    return;
  }
  if (sprite.kind === 'goal') {
    ctx.fillStyle = COLORS.goal;
    ctx.fillRect(cx - r, cy - r, 2 * r, 2 * r);
    return;
  }
  ctx.fillStyle = COLORS.avatar;
  ctx.beginPath();
  const angle = headingAngle(sprite.heading ?? 'N');
  for (let i = 0; i < 3; i++) {
    const a = angle + (i * 2 * Math.PI) / 3;
    const rr = i === 0 ? r : r * 0.7;
    const px = cx + rr * Math.sin(a);
    const py = cy - rr * Math.cos(a);
    if (i === 0) ctx.moveTo(px, py);
    else ctx.lineTo(px, py);
  }
  ctx.closePath();
  ctx.fill();
}

function headingAngle(heading: Heading): number {
  switch (heading) {
    case 'N': return 0;
    case 'E': return Math.PI / 2;
    case 'S': return Math.PI;
    case 'W': return (3 * Math.PI) / 2;
  }
}
