// SPDX-License-Identifier: Apache-2.0
import init, { crosstalkMap, bellConcurrence, isoContour } from "./pkg/subradiance_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
let source = [25, 20];

function report(id, text, isError) {
  $(id).textContent = text;
  $(id).className = isError ? "err" : "";
}

// Diverging palette: blue at -1, white at 0, red at +1.
function color(v) {
  const t = Math.max(-1, Math.min(1, v));
  const a = Math.round(255 * (1 - Math.abs(t)));
  return t >= 0 ? [255, a, a] : [a, a, 255];
}

function drawMap() {
  const nx = num("mx"), ny = num("my");
  source = [Math.min(source[0], nx), Math.min(source[1], ny)];
  let grid;
  try {
    grid = crosstalkMap(nx, ny, $("mo").value, num("mj"), source[0], source[1], num("mt"));
  } catch (e) {
    report("minfo", String(e), true);
    return;
  }
  const c = $("map"), ctx = c.getContext("2d");
  const img = ctx.createImageData(nx, ny);
  for (let y = 0; y < ny; y++) {
    for (let x = 0; x < nx; x++) {
      const [r, g, b] = color(grid[y * nx + x]);
      const k = 4 * ((ny - 1 - y) * nx + x);
      img.data.set([r, g, b, 255], k);
    }
  }
  const off = new OffscreenCanvas(nx, ny);
  off.getContext("2d").putImageData(img, 0, 0);
  ctx.imageSmoothingEnabled = false;
  ctx.clearRect(0, 0, c.width, c.height);
  ctx.drawImage(off, 0, 0, c.width, c.height);
  report("minfo", `source (${source[0]}, ${source[1]})`, false);
}

$("map").addEventListener("click", (ev) => {
  const c = $("map"), r = c.getBoundingClientRect();
  const nx = num("mx"), ny = num("my");
  const x = 1 + Math.floor(((ev.clientX - r.left) / r.width) * nx);
  const y = ny - Math.floor(((ev.clientY - r.top) / r.height) * ny);
  source = [x, y];
  $("bx1").value = x;
  $("by1").value = y;
  drawMap();
});

function drawBell() {
  let flat;
  try {
    flat = bellConcurrence(num("mx"), num("my"), $("mo").value,
      num("bx1"), num("by1"), num("bx2"), num("by2"), num("bl"), num("bt"), 1.0);
  } catch (e) {
    report("binfo", String(e), true);
    return;
  }
  const c = $("bell"), ctx = c.getContext("2d");
  ctx.clearRect(0, 0, c.width, c.height);
  const tMax = flat[flat.length - 3] || 1;
  const px = (t) => 30 + (t / tMax) * (c.width - 40);
  const py = (v) => c.height - 20 - v * (c.height - 40);
  ctx.strokeStyle = "#888";
  ctx.strokeRect(px(0), py(1), px(tMax) - px(0), py(0) - py(1));
  for (const [col, off] of [["#1f5fbf", 1], ["#e07b00", 2]]) {
    ctx.strokeStyle = col;
    ctx.beginPath();
    for (let i = 0; i < flat.length; i += 3) {
      const f = i === 0 ? "moveTo" : "lineTo";
      ctx[f](px(flat[i]), py(flat[i + off]));
    }
    ctx.stroke();
  }
  const n = flat.length;
  report("binfo", `Jt = ${tMax}: dark ${flat[n - 2].toFixed(3)}, bright ${flat[n - 1].toFixed(3)}`, false);
}

function drawContour() {
  let pts;
  try {
    pts = isoContour($("co").value, num("cj"), 0.0, 200);
  } catch (e) {
    report("cinfo", String(e), true);
    return;
  }
  const c = $("contour"), ctx = c.getContext("2d");
  ctx.clearRect(0, 0, c.width, c.height);
  ctx.strokeStyle = "#888";
  ctx.strokeRect(0, 0, c.width, c.height);
  const s = (k) => (k / Math.PI) * c.width;
  ctx.strokeStyle = "#000";
  ctx.beginPath();
  let pen = false, branches = 1;
  for (let i = 0; i < pts.length; i += 2) {
    if (Number.isNaN(pts[i])) {
      pen = false;
      branches++;
      continue;
    }
    ctx[pen ? "lineTo" : "moveTo"](s(pts[i]), c.height - s(pts[i + 1]));
    pen = true;
  }
  ctx.stroke();
  report("cinfo", `${branches} branch(es), kx and ky in [0, pi]`, false);
}

await init();
$("mgo").onclick = drawMap;
$("bgo").onclick = drawBell;
$("cgo").onclick = drawContour;
drawMap();
drawContour();
