import init, { spectrum_curve, kinetic_slice, delta_k_curve } from "./pkg/qfnoise_wasm.js";

const $ = (id) => document.getElementById(id);

// Log-log plot of several series sharing one x array.
function logPlot(canvas, xs, series, xlabel) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 48;
  ctx.clearRect(0, 0, w, h);
  const lx = xs.map(Math.log10);
  const ly = series.flatMap((s) => s.ys.map(Math.log10)).filter(Number.isFinite);
  const [x0, x1] = [Math.min(...lx), Math.max(...lx)];
  const [y0, y1] = [Math.floor(Math.min(...ly)), Math.ceil(Math.max(...ly))];
  const px = (v) => pad + ((v - x0) / (x1 - x0)) * (w - 2 * pad);
  const py = (v) => h - pad - ((v - y0) / (y1 - y0 || 1)) * (h - 2 * pad);

  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#333";
  ctx.font = "11px sans-serif";
  for (let d = Math.ceil(x0); d <= x1; d++) ctx.fillText(`1e${d}`, px(d) - 12, h - pad + 14);
  for (let d = y0; d <= y1; d++) ctx.fillText(`1e${d}`, 4, py(d) + 4);
  ctx.fillText(xlabel, w / 2 - 20, h - 8);

  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    s.ys.forEach((y, i) => {
      const [X, Y] = [px(lx[i]), py(Math.log10(y))];
      i ? ctx.lineTo(X, Y) : ctx.moveTo(X, Y);
    });
    ctx.stroke();
  }
}

// Split a flat array of triples into columns.
function columns(flat) {
  const c = [[], [], []];
  for (let i = 0; i < flat.length; i += 3) for (let k = 0; k < 3; k++) c[k].push(flat[i + k]);
  return c;
}

function drawSpectrum() {
  const rd = 10 ** Number($("rd").value);
  const chi = Number($("chi").value);
  $("rd-out").textContent = rd.toFixed(0);
  $("chi-out").textContent = chi.toFixed(2);
  const [x, exact, asym] = columns(spectrum_curve(rd, chi, 25));
  logPlot($("spectrum"), x, [
    { ys: exact, color: "#c33" },
    { ys: asym, color: "#36c" },
  ], "omega / omega0");
}

function drawSlice() {
  const q0 = Number($("q0").value);
  const width = Number($("width").value);
  $("q0-out").textContent = q0.toFixed(2);
  $("width-out").textContent = width.toFixed(2);
  const n = 60;
  const v = kinetic_slice(q0, width, n);
  const canvas = $("slice");
  const ctx = canvas.getContext("2d");
  const img = ctx.createImageData(n, 2 * n);
  // rows run q_z from +1.5 to -1.5; stretch vertically by two
  for (let j = 0; j < n; j++) {
    for (let i = 0; i < n; i++) {
      const t = Math.min(1, v[j * n + i]);
      for (const r of [2 * j, 2 * j + 1]) {
        const o = 4 * (r * n + i);
        img.data[o] = 255 * t;
        img.data[o + 1] = 80 + 120 * t;
        img.data[o + 2] = 255 * (1 - t);
        img.data[o + 3] = 255;
      }
    }
  }
  const tmp = new OffscreenCanvas(n, 2 * n);
  tmp.getContext("2d").putImageData(img, 0, 0);
  ctx.imageSmoothingEnabled = false;
  ctx.drawImage(tmp, 0, 0, canvas.width, canvas.height);
}

function drawDeltaK() {
  const chi = Number($("chi-k").value);
  $("chi-k-out").textContent = chi.toFixed(2);
  const [x, exact, closed] = columns(delta_k_curve(chi, 30));
  logPlot($("deltak"), x, [
    { ys: exact, color: "#c33" },
    { ys: closed, color: "#36c" },
  ], "q0 / qF");
}

await init();
for (const [ids, draw] of [[["rd", "chi"], drawSpectrum], [["q0", "width"], drawSlice], [["chi-k"], drawDeltaK]]) {
  for (const id of ids) $(id).addEventListener("input", draw);
  draw();
}
