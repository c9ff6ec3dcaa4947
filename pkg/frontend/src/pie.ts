/** Pie chart geometry and canvas rendering for genre percentage maps. */

export interface Slice {
  genre: string;
  percent: number;
  start: number; // radians, 12 o'clock = -PI/2, clockwise
  end: number;
  color: string;
}

const PALETTE = [
  "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948",
  "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac", "#86bcb6",
];

export const MIN_LABELED_PERCENT = 3.0;

/**
 * Turn a {genre: percent} map into drawable slices. The percentages are
 * used verbatim (the client never recomputes them); a map whose values sum
 * outside [99.9, 100.1] is refused rather than silently rescaled.
 */
export function computeSlices(percentages: Record<string, number>): Slice[] {
  const entries = Object.entries(percentages);
  const total = entries.reduce((acc, [, pct]) => acc + pct, 0);
  if (total < 99.9 || total > 100.1) {
    throw new Error(`percentages sum to ${total.toFixed(2)}, expected 100 +- 0.1`);
  }
  const slices: Slice[] = [];
  let angle = -Math.PI / 2;
  entries.forEach(([genre, percent], index) => {
    const sweep = (percent / total) * 2 * Math.PI;
    slices.push({
      genre,
      percent,
      start: angle,
      end: angle + sweep,
      color: PALETTE[index % PALETTE.length],
    });
    angle += sweep;
  });
  return slices;
}

export function sliceLabel(slice: Slice): string {
  return `${slice.genre} ${slice.percent.toFixed(1)}%`;
}

/**
 * Draw one pie into a canvas. The slice sum is recorded on
 * `canvas.dataset.sum` and the title on `dataset.title` so headless tests
 * can verify what was displayed; drawing is skipped when no 2d context is
 * available (jsdom).
 */
export function renderPie(
  canvas: HTMLCanvasElement,
  title: string,
  percentages: Record<string, number>,
): Slice[] {
  const slices = computeSlices(percentages);
  canvas.dataset.sum = slices.reduce((acc, s) => acc + s.percent, 0).toFixed(2);
  canvas.dataset.title = title;

  const ctx = canvas.getContext("2d");
  if (!ctx) return slices;

  const width = canvas.width;
  const height = canvas.height;
  const cx = width / 2;
  const cy = height / 2 + 8;
  const radius = Math.min(width, height) / 2 - 40;

  ctx.clearRect(0, 0, width, height);
  ctx.font = "13px sans-serif";
  ctx.fillStyle = "#222";
  ctx.textAlign = "center";
  ctx.fillText(title, cx, 16);

  for (const slice of slices) {
    if (slice.end - slice.start <= 0) continue;
    ctx.beginPath();
    ctx.moveTo(cx, cy);
    ctx.arc(cx, cy, radius, slice.start, slice.end);
    ctx.closePath();
    ctx.fillStyle = slice.color;
    ctx.fill();

    if (slice.percent >= MIN_LABELED_PERCENT) {
      const mid = (slice.start + slice.end) / 2;
      const lx = cx + Math.cos(mid) * (radius + 18);
      const ly = cy + Math.sin(mid) * (radius + 18);
      ctx.fillStyle = "#222";
      ctx.font = "11px sans-serif";
      ctx.fillText(sliceLabel(slice), lx, ly);
    }
  }
  return slices;
}
