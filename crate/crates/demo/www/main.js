import init, { trajectories, bifurcation, sigma_max } from "./pkg/qmarch_demo.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
const status = (msg) => { $("status").textContent = msg; };

function plot(canvas, series, xlabel, ylabel) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 40;
  ctx.clearRect(0, 0, w, h);
  let [x0, x1, y0, y1] = [Infinity, -Infinity, Infinity, -Infinity];
  for (const s of series) {
    for (let i = 0; i < s.xs.length; i++) {
      x0 = Math.min(x0, s.xs[i]); x1 = Math.max(x1, s.xs[i]);
      y0 = Math.min(y0, s.ys[i]); y1 = Math.max(y1, s.ys[i]);
    }
  }
  if (x1 === x0) { x0 -= 1; x1 += 1; }
  if (y1 === y0) { y0 -= 1; y1 += 1; }
  const sx = (x) => pad + (x - x0) / (x1 - x0) * (w - 2 * pad);
  const sy = (y) => h - pad - (y - y0) / (y1 - y0) * (h - 2 * pad);
  ctx.strokeStyle = "#888";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#333";
  ctx.fillText(`${xlabel} [${x0.toPrecision(4)}, ${x1.toPrecision(4)}]`, pad, h - 10);
  ctx.fillText(`${ylabel} [${y0.toPrecision(4)}, ${y1.toPrecision(4)}]`, pad, pad - 10);
  for (const s of series) {
    ctx.strokeStyle = ctx.fillStyle = s.color;
    if (s.dots) {
      for (let i = 0; i < s.xs.length; i++) ctx.fillRect(sx(s.xs[i]) - 1, sy(s.ys[i]) - 1, 2, 2);
    } else {
      ctx.beginPath();
      for (let i = 0; i < s.xs.length; i++) {
        i ? ctx.lineTo(sx(s.xs[i]), sy(s.ys[i])) : ctx.moveTo(sx(s.xs[i]), sy(s.ys[i]));
      }
      ctx.stroke();
    }
  }
}

function columns(flat, width, picks) {
  const n = flat.length / width;
  return picks.map((k) => Float64Array.from({ length: n }, (_, i) => flat[i * width + k]));
}

function guarded(fn) {
  return () => {
    status("");
    try { fn(); } catch (e) { status(String(e.message ?? e)); }
  };
}

await init();

$("t-run").onclick = guarded(() => {
  const steps = num("t-steps");
  const data = trajectories(num("t-beta"), num("t-dt"), steps, Math.max(1, Math.floor(steps / 20000)));
  const [xq, zq, xc, zc] = columns(data, 7, [1, 3, 4, 6]);
  plot($("t-canvas"), [
    { xs: xc, ys: zc, color: "#e80" },
    { xs: xq, ys: zq, color: "#14c" },
  ], "x", "z");
});

$("b-run").onclick = guarded(() => {
  const data = bifurcation(num("b-min"), num("b-max"), num("b-step"), 2.5e-4, num("b-t"), $("b-quantum").checked);
  const [b, z] = columns(data, 2, [0, 1]);
  plot($("b-canvas"), [{ xs: b, ys: z, color: "#14c", dots: true }], "β", "z");
});

$("s-run").onclick = guarded(() => {
  const data = sigma_max(num("s-beta"), num("s-min"), num("s-max"), 100);
  const [dt, s] = columns(data, 2, [0, 1]);
  plot($("s-canvas"), [{ xs: dt, ys: s, color: "#14c" }], "dt", "σ_max");
});
