import init, { Scene, profile_response } from "./pkg/lipvessel_wasm.js";

const $ = (id) => document.getElementById(id);
let scene = null;

function paint(id, w, h, rgba) {
  const c = $(id);
  c.width = w;
  c.height = h;
  c.getContext("2d").putImageData(new ImageData(new Uint8ClampedArray(rgba), w, h), 0, 0);
}

function clear(...ids) {
  for (const id of ids) {
    const c = $(id);
    c.getContext("2d").clearRect(0, 0, c.width, c.height);
  }
}

function generate() {
  if (scene) scene.free();
  scene = new Scene(+$("size").value, +$("seed").value, +$("lighting").value);
  const [w, h] = [scene.width(), scene.height()];
  paint("c-image", w, h, scene.image_rgba());
  paint("c-truth", w, h, scene.truth_rgba());
  clear("c-vesselness", "c-phi", "c-mask", "c-overlay");
  $("status").textContent = "";
}

function segment() {
  if (!scene) generate();
  $("status").textContent = "running...";
  // let the status line render before the synchronous call
  setTimeout(() => {
    const t0 = performance.now();
    let s;
    try {
      s = scene.segment(+$("fov-angle").value, +$("max-probes").value,
        +$("orientations").value, +$("area-fraction").value);
    } catch (e) {
      $("status").textContent = "error: " + e;
      return;
    }
    const ms = performance.now() - t0;
    const [w, h] = [scene.width(), scene.height()];
    paint("c-vesselness", w, h, s.vesselness_rgba());
    paint("c-phi", w, h, s.phi_rgba());
    paint("c-mask", w, h, s.mask_rgba());
    paint("c-overlay", w, h, s.overlay_rgba());
    const widths = Array.from(s.probe_widths()).map((v) => v.toFixed(1)).join(", ");
    $("status").textContent =
      `probes used I = ${s.probes_used()} (widths ${widths})  ` +
      `Se = ${s.se().toFixed(4)}  Sp = ${s.sp().toFixed(4)}  Acc = ${s.acc().toFixed(4)}  ` +
      `${ms.toFixed(0)} ms`;
    s.free();
  }, 10);
}

function profile() {
  const n = 200;
  const bump = +$("bump").value;
  const step = +$("step").value;
  const f = new Float64Array(n);
  for (let x = 0; x < n; x++) {
    let v = 80;
    const d = x - 60;
    if (Math.abs(d) <= 4) v += bump * (1 - (d * d) / 16);
    if (x >= 130) v += step;
    f[x] = v;
  }
  let e;
  try {
    e = profile_response(f, +$("p-side").value, +$("p-center").value, +$("half").value);
  } catch (err) {
    e = new Float64Array(n).fill(NaN);
  }
  const c = $("c-profile");
  const g = c.getContext("2d");
  g.clearRect(0, 0, c.width, c.height);
  const sx = c.width / (n - 1);
  const sy = (v) => c.height - 10 - (v / 256) * (c.height - 20);
  const line = (values, colour) => {
    g.strokeStyle = colour;
    g.lineWidth = 2;
    g.beginPath();
    let pen = false;
    values.forEach((v, x) => {
      if (Number.isNaN(v)) {
        pen = false;
        return;
      }
      if (pen) g.lineTo(x * sx, sy(v));
      else g.moveTo(x * sx, sy(v));
      pen = true;
    });
    g.stroke();
  };
  line(Array.from(f), "#888");
  line(Array.from(e), "#1f5fd0");
}

await init();
$("generate").onclick = generate;
$("segment").onclick = segment;
$("lighting").oninput = () => { $("lighting-value").textContent = $("lighting").value; };
for (const id of ["bump", "step", "half", "p-center", "p-side"]) $(id).oninput = profile;
generate();
profile();
