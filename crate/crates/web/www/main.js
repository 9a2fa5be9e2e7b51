import init, { spectrumCurves, survivalTrace, regimeMap, regionAt, classifyKet } from "./pkg/rabi_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
const REGIONS = ["perturbative USC", "non-perturbative", "perturbative DSC"];
const COLORS = [[70, 130, 200], [200, 200, 200], [235, 150, 60]];
const MAP = { gMax: 6, eMin: -40, eMax: 10 };

function axes(ctx, box, xr, yr, xlabel, ylabel) {
  const { w, h, pad } = box;
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#444";
  ctx.strokeRect(pad, 10, w - pad - 10, h - pad - 10);
  ctx.fillStyle = "#444";
  ctx.font = "12px sans-serif";
  ctx.fillText(xr[0].toFixed(2), pad, h - pad + 16);
  ctx.fillText(xr[1].toFixed(2), w - 50, h - pad + 16);
  ctx.fillText(yr[1].toFixed(2), 4, 20);
  ctx.fillText(yr[0].toFixed(2), 4, h - pad);
  ctx.fillText(xlabel, w / 2, h - 6);
  ctx.fillText(ylabel, 4, h / 2);
  return (x, y) => [
    pad + ((x - xr[0]) / (xr[1] - xr[0])) * (w - pad - 10),
    10 + (1 - (y - yr[0]) / (yr[1] - yr[0])) * (h - pad - 10),
  ];
}

function report(id, fn) {
  try {
    $(id).textContent = "";
    fn();
  } catch (e) {
    $(id).textContent = String(e.message ?? e);
  }
}

function drawSpectrum() {
  report("specMsg", () => {
    const steps = 160;
    const levels = num("specLevels");
    const data = spectrumCurves(num("omegaQ"), num("specG"), steps, levels);
    const stride = levels + 1;
    let lo = Infinity, hi = -Infinity;
    for (let k = 0; k < steps; k++) {
      for (let l = 1; l < stride; l++) {
        lo = Math.min(lo, data[k * stride + l]);
        hi = Math.max(hi, data[k * stride + l]);
      }
    }
    const cv = $("specCanvas"), ctx = cv.getContext("2d");
    const map = axes(ctx, { w: cv.width, h: cv.height, pad: 50 }, [0, num("specG")], [lo, hi], "g / omega", "E");
    for (let l = 1; l < stride; l++) {
      ctx.strokeStyle = `hsl(${(l * 47) % 360} 60% 45%)`;
      ctx.beginPath();
      for (let k = 0; k < steps; k++) {
        const [x, y] = map(data[k * stride], data[k * stride + l]);
        k === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y);
      }
      ctx.stroke();
    }
  });
}

function drawSurvival() {
  report("dynMsg", () => {
    const dt = 0.01, tMax = num("dynT");
    const s = survivalTrace(num("omegaQ"), num("dynG"), $("dynQ").value === "e", num("dynN"), tMax, dt);
    const cv = $("dynCanvas"), ctx = cv.getContext("2d");
    const map = axes(ctx, { w: cv.width, h: cv.height, pad: 40 }, [0, tMax], [0, 1], "omega t", "P");
    ctx.strokeStyle = "#2a6";
    ctx.beginPath();
    s.forEach((p, k) => {
      const [x, y] = map(k * dt, p);
      k === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y);
    });
    ctx.stroke();
  });
}

let mapTransform = null;

function drawMap() {
  const cv = $("mapCanvas"), ctx = cv.getContext("2d");
  const pad = 50, cols = cv.width - pad - 10, rows = cv.height - pad - 10;
  const codes = regimeMap(MAP.gMax, MAP.eMin, MAP.eMax, cols, rows, num("mapDelta"));
  mapTransform = axes(ctx, { w: cv.width, h: cv.height, pad }, [0, MAP.gMax], [MAP.eMin, MAP.eMax], "g / omega", "E");
  const img = ctx.createImageData(cols, rows);
  codes.forEach((c, i) => {
    img.data.set([...COLORS[c], 255], 4 * i);
  });
  ctx.putImageData(img, pad, 10);
}

function mark(g, e, text) {
  const ctx = $("mapCanvas").getContext("2d");
  const [x, y] = mapTransform(g, Math.max(MAP.eMin, Math.min(MAP.eMax, e)));
  ctx.fillStyle = "#000";
  ctx.beginPath();
  ctx.arc(x, y, 4, 0, 2 * Math.PI);
  ctx.fill();
  $("mapOut").textContent = text;
}

function fmt(x) {
  return Number.isNaN(x) ? "n/a" : x.toFixed(4);
}

function classifyControls() {
  try {
    drawMap();
    const g = num("mapG");
    const [e, region, pc, pe, dc, de] = classifyKet(num("omegaQ"), g, $("mapQ").value === "e", num("mapN"), num("mapDelta"));
    mark(g, e, `<E> = ${fmt(e)}: ${REGIONS[region]} | pUSC margins g ${fmt(pc)}, E ${fmt(pe)} | pDSC margins g ${fmt(dc)}, E ${fmt(de)}`);
  } catch (err) {
    $("mapOut").textContent = String(err.message ?? err);
  }
}

function classifyClick(ev) {
  const cv = $("mapCanvas"), pad = 50;
  const r = cv.getBoundingClientRect();
  const fx = (ev.clientX - r.left - pad) / (cv.width - pad - 10);
  const fy = (ev.clientY - r.top - 10) / (cv.height - pad - 10);
  if (fx < 0 || fx > 1 || fy < 0 || fy > 1) return;
  const g = fx * MAP.gMax, e = MAP.eMax - fy * (MAP.eMax - MAP.eMin);
  drawMap();
  mark(g, e, `g = ${fmt(g)}, E = ${fmt(e)}: ${REGIONS[regionAt(g, e, num("mapDelta"))]}`);
}

await init();
$("specRun").onclick = drawSpectrum;
$("dynRun").onclick = drawSurvival;
$("mapRun").onclick = classifyControls;
$("mapCanvas").onclick = classifyClick;
drawSpectrum();
drawSurvival();
classifyControls();
