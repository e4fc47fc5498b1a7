import init, { declip, dequantize, sweep } from "./pkg/sparse_consist_wasm.js";

const $ = (id) => document.getElementById(id);
const COLORS = { clean: "#888", observed: "#d62728", ista: "#1f77b4", fista: "#2ca02c", input: "#d62728" };

function plot(canvas, series, { logY = false, xs = null } = {}) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 30;
  ctx.clearRect(0, 0, w, h);
  const tf = (v) => (logY ? Math.log10(Math.max(v, 1e-300)) : v);
  const all = series.flatMap((s) => Array.from(s.data, tf)).filter(Number.isFinite);
  if (all.length === 0) return;
  let lo = Math.min(...all), hi = Math.max(...all);
  if (hi === lo) { hi += 1; lo -= 1; }
  const n = Math.max(...series.map((s) => s.data.length));
  const xv = xs ? Array.from(xs) : [...Array(n).keys()];
  const x0 = xv[0], x1 = xv[xv.length - 1] === x0 ? x0 + 1 : xv[xv.length - 1];
  const px = (i) => pad + ((xv[i] - x0) / (x1 - x0)) * (w - 2 * pad);
  const py = (v) => h - pad - ((tf(v) - lo) / (hi - lo)) * (h - 2 * pad);

  ctx.strokeStyle = "#ccc";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#555";
  ctx.font = "11px sans-serif";
  const fmt = (v) => (logY ? `1e${v.toFixed(1)}` : v.toFixed(2));
  ctx.fillText(fmt(hi), 2, pad + 4);
  ctx.fillText(fmt(lo), 2, h - pad);
  if (xs) {
    xv.forEach((x, i) => ctx.fillText(String(x), px(i) - 6, h - pad + 14));
  }

  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.lineWidth = s.width ?? 1.5;
    ctx.beginPath();
    let started = false;
    s.data.forEach((v, i) => {
      if (!Number.isFinite(tf(v))) return;
      started ? ctx.lineTo(px(i), py(v)) : ctx.moveTo(px(i), py(v));
      started = true;
    });
    ctx.stroke();
  }
}

function runSingle() {
  const seed = Number($("seed").value);
  const lambda = Number($("lambda").value);
  const iters = Number($("iters").value);
  const r = $("mode").value === "declip"
    ? declip(seed, Number($("theta").value), lambda, iters)
    : dequantize(seed, Number($("bits").value), lambda, iters);
  plot($("signal"), [
    { data: r.clean, color: COLORS.clean, width: 3 },
    { data: r.observed, color: COLORS.observed },
    { data: r.ista, color: COLORS.ista },
    { data: r.fista, color: COLORS.fista },
  ]);
  plot($("objective"), [
    { data: r.istaObjective, color: COLORS.ista },
    { data: r.fistaObjective, color: COLORS.fista },
  ], { logY: true });
  $("stats").textContent =
    `SNR  input ${r.inputSnr.toFixed(2)} dB   ISTA ${r.istaSnr.toFixed(2)} dB   FISTA ${r.fistaSnr.toFixed(2)} dB`;
  r.free();
}

function runSweep() {
  const s = sweep($("task").value, Number($("seed").value), Number($("trials").value), Number($("lambda").value));
  plot($("curve"), [
    { data: s.input, color: COLORS.input },
    { data: s.ista, color: COLORS.ista },
    { data: s.fista, color: COLORS.fista },
  ], { xs: s.levels });
  s.free();
}

function guarded(fn) {
  return () => {
    $("error").textContent = "";
    try {
      fn();
    } catch (e) {
      $("error").textContent = String(e);
    }
  };
}

await init();
$("theta").addEventListener("input", () => { $("theta-val").textContent = $("theta").value; });
for (const id of ["mode", "theta", "bits", "lambda", "iters", "seed"]) {
  $(id).addEventListener("change", guarded(runSingle));
}
$("run").addEventListener("click", guarded(runSingle));
$("sweep").addEventListener("click", guarded(runSweep));
guarded(runSingle)();
