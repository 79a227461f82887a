// Built by `wasm-pack build crates/wasm --target web --out-dir www/pkg`.
import init, { kappaCurve, chaosGame, checkSeparation } from "./pkg/qdim_wasm.js";

const PRESETS = {
  cantor: {
    ambient_dim: 1,
    maps: [
      { scale: 1 / 3, translation: [0] },
      { scale: 1 / 3, translation: [2 / 3] },
    ],
    probs: [0.5, 0.5],
  },
  quarter: {
    ambient_dim: 1,
    maps: [
      { scale: 0.25, translation: [0] },
      { scale: 0.25, translation: [0.2] },
      { scale: 0.25, translation: [0.75] },
    ],
    probs: [0.25, 0.25, 0.5],
  },
  uneven: {
    ambient_dim: 1,
    maps: [
      { scale: 0.5, translation: [0] },
      { scale: 0.25, translation: [0.75] },
    ],
    probs: [0.25, 0.75],
  },
  triangle: {
    ambient_dim: 2,
    maps: [
      { scale: 0.5, translation: [0, 0] },
      { scale: 0.5, translation: [0.5, 0] },
      { scale: 0.5, translation: [0.25, 0.5] },
    ],
    probs: [0.25, 0.25, 0.5],
  },
};

const $ = (id) => document.getElementById(id);

function attempt(fn) {
  $("status").textContent = "";
  try {
    fn();
  } catch (err) {
    $("status").textContent = String(err.message ?? err);
  }
}

function frame(canvas, xs, ys, pad = 30) {
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  const [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  const sx = (canvas.width - 2 * pad) / (x1 - x0 || 1);
  const sy = (canvas.height - 2 * pad) / (y1 - y0 || 1);
  return {
    x: (v) => pad + (v - x0) * sx,
    y: (v) => canvas.height - pad - (v - y0) * sy,
    x0, x1, y0, y1,
  };
}

function plotCurve() {
  const doc = JSON.parse(kappaCurve($("wifs").value, Number($("rmin").value), Number($("rmax").value), 200));
  const canvas = $("curve");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const rs = doc.points.map((p) => p.r);
  const ks = doc.points.map((p) => p.kappa_r).concat([doc.d0, doc.similarity_dim]);
  const f = frame(canvas, rs, ks);
  const hline = (v, color) => {
    ctx.strokeStyle = color;
    ctx.setLineDash([4, 4]);
    ctx.beginPath();
    ctx.moveTo(f.x(f.x0), f.y(v));
    ctx.lineTo(f.x(f.x1), f.y(v));
    ctx.stroke();
    ctx.setLineDash([]);
  };
  hline(doc.d0, "#999");
  hline(doc.similarity_dim, "#c80");
  ctx.strokeStyle = "#06c";
  ctx.lineWidth = 2;
  ctx.beginPath();
  doc.points.forEach((p, i) => (i ? ctx.lineTo : ctx.moveTo).call(ctx, f.x(p.r), f.y(p.kappa_r)));
  ctx.stroke();
  ctx.lineWidth = 1;
  ctx.fillStyle = "#000";
  ctx.fillText(`r = ${f.x0}`, 30, canvas.height - 8);
  ctx.fillText(`r = ${f.x1}`, canvas.width - 80, canvas.height - 8);
  const last = doc.points[doc.points.length - 1];
  $("curve-info").textContent =
    `D0 = ${doc.d0.toFixed(6)} (grey)   similarity dimension = ${doc.similarity_dim.toFixed(6)} (orange)\n` +
    `kappa at r = ${doc.points[0].r}: ${doc.points[0].kappa_r.toFixed(6)}   at r = ${last.r}: ${last.kappa_r.toFixed(6)}\n` +
    `non-decreasing: ${doc.monotone}`;
}

function plotCloud() {
  const count = Number($("count").value);
  const doc = JSON.parse(chaosGame($("wifs").value, count, BigInt($("seed").value)));
  const canvas = $("cloud");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.fillStyle = "rgba(0, 80, 160, 0.35)";
  if (doc.dim === 1) {
    // histogram over the hull
    const bins = 300;
    const [lo, hi] = [doc.hull.lo[0], doc.hull.hi[0]];
    const counts = new Array(bins).fill(0);
    for (const x of doc.coords) {
      counts[Math.min(bins - 1, Math.floor(((x - lo) / (hi - lo || 1)) * bins))] += 1;
    }
    const top = Math.max(...counts);
    const w = canvas.width / bins;
    counts.forEach((c, i) => {
      const h = (c / top) * (canvas.height - 10);
      ctx.fillRect(i * w, canvas.height - h, Math.max(1, w - 0.5), h);
    });
  } else {
    const xs = [], ys = [];
    for (let i = 0; i < doc.coords.length; i += doc.dim) {
      xs.push(doc.coords[i]);
      ys.push(doc.coords[i + 1]);
    }
    const f = frame(canvas, [doc.hull.lo[0], doc.hull.hi[0]], [doc.hull.lo[1], doc.hull.hi[1]], 10);
    for (let i = 0; i < xs.length; i++) ctx.fillRect(f.x(xs[i]), f.y(ys[i]), 1.2, 1.2);
  }
}

function plotSeparation() {
  const doc = JSON.parse(checkSeparation($("wifs").value, $("words").value));
  const canvas = $("sep");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const f = frame(canvas, [doc.hull.lo[0], doc.hull.hi[0]], [0, 1], 20);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(f.x(doc.hull.lo[0]), 20, f.x(doc.hull.hi[0]) - f.x(doc.hull.lo[0]), 20);
  const colors = ["#06c", "#c60", "#093", "#909", "#c03", "#0aa"];
  doc.images.forEach((b, i) => {
    ctx.fillStyle = colors[i % colors.length];
    ctx.globalAlpha = 0.6;
    ctx.fillRect(f.x(b.lo[0]), 55 + (i % 3) * 18, Math.max(2, f.x(b.hi[0]) - f.x(b.lo[0])), 14);
    ctx.globalAlpha = 1;
    ctx.fillText(doc.words[i], f.x(b.lo[0]), 52 + (i % 3) * 18);
  });
  $("sep-info").textContent =
    `SSC: ${doc.ssc.status} (min gap ${doc.ssc.min_gap})\n` +
    `OSC (sufficient check): ${doc.osc.status}` +
    (doc.hull.lo.length > 1 ? "\nimage strip shows the first coordinate only" : "");
}

function loadPreset() {
  $("wifs").value = JSON.stringify(PRESETS[$("preset").value], null, 1);
  $("words").value = $("preset").value === "quarter" ? "11,21,31" : "";
  attempt(plotCurve);
  attempt(plotCloud);
  attempt(plotSeparation);
}

await init();
$("preset").addEventListener("change", loadPreset);
$("curve-run").addEventListener("click", () => attempt(plotCurve));
$("cloud-run").addEventListener("click", () => attempt(plotCloud));
$("sep-run").addEventListener("click", () => attempt(plotSeparation));
$("preset").value = "quarter";
loadPreset();
