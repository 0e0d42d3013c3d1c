/** Deterministic force-directed layout: spring forces along edges,
 *  pairwise repulsion, mild centering. Seeded so a given graph always
 *  renders the same picture. */

export interface LayoutPoint {
  x: number;
  y: number;
}

export interface LayoutInput {
  labels: string[];
  edges: Array<{ source: string; target: string }>;
  width: number;
  height: number;
  iterations?: number;
  seed?: number;
}

function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function forceLayout(input: LayoutInput): Map<string, LayoutPoint> {
  const { labels, edges, width, height } = input;
  const iterations = input.iterations ?? 150;
  const rand = mulberry32(input.seed ?? 42);
  const n = labels.length;
  const index = new Map(labels.map((lab, i) => [lab, i]));
  const xs = new Float64Array(n);
  const ys = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    xs[i] = width * (0.15 + 0.7 * rand());
    ys[i] = height * (0.15 + 0.7 * rand());
  }
  const pairs: Array<[number, number]> = [];
  for (const e of edges) {
    const a = index.get(e.source);
    const b = index.get(e.target);
    if (a !== undefined && b !== undefined && a !== b) {
      pairs.push([a, b]);
    }
  }

  const area = width * height;
  const ideal = Math.sqrt(area / Math.max(1, n)) * 0.9;
  for (let iter = 0; iter < iterations; iter++) {
    const fx = new Float64Array(n);
    const fy = new Float64Array(n);
    const cool = 1 - iter / iterations;
    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) {
        let dx = xs[i] - xs[j];
        let dy = ys[i] - ys[j];
        const d2 = dx * dx + dy * dy + 0.01;
        const rep = (ideal * ideal) / d2;
        dx *= rep;
        dy *= rep;
        fx[i] += dx;
        fy[i] += dy;
        fx[j] -= dx;
        fy[j] -= dy;
      }
    }
    for (const [a, b] of pairs) {
      const dx = xs[b] - xs[a];
      const dy = ys[b] - ys[a];
      const dist = Math.sqrt(dx * dx + dy * dy) + 1e-9;
      // attraction d^2/ideal along the edge (split across both endpoints)
      const pull = dist / ideal / 2;
      fx[a] += dx * pull;
      fy[a] += dy * pull;
      fx[b] -= dx * pull;
      fy[b] -= dy * pull;
    }
    const step = 4 * cool + 0.3;
    for (let i = 0; i < n; i++) {
      // centering drift plus capped force step
      fx[i] += (width / 2 - xs[i]) * 0.01;
      fy[i] += (height / 2 - ys[i]) * 0.01;
      const mag = Math.sqrt(fx[i] * fx[i] + fy[i] * fy[i]) + 1e-9;
      const scale = Math.min(step, mag) / mag;
      xs[i] = Math.min(width - 18, Math.max(18, xs[i] + fx[i] * scale));
      ys[i] = Math.min(height - 18, Math.max(18, ys[i] + fy[i] * scale));
    }
  }
  const out = new Map<string, LayoutPoint>();
  labels.forEach((lab, i) => out.set(lab, { x: xs[i], y: ys[i] }));
  return out;
}
