import init, { profileText, trendTest, lagCorrelation } from "./pkg/trendlens_web.js";

const $ = (id) => document.getElementById(id);

function show(id, text, isError = false) {
  const el = $(id);
  el.textContent = text;
  el.className = isError ? "out err" : "out";
}

function clear(canvas) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.font = "12px system-ui, sans-serif";
  return ctx;
}

function bars(canvas, labels, values, { highlight = () => false, min = 0, max = 1, marks = [] } = {}) {
  const ctx = clear(canvas);
  const pad = { l: 40, r: 10, t: 10, b: 40 };
  const w = canvas.width - pad.l - pad.r;
  const h = canvas.height - pad.t - pad.b;
  const y = (v) => pad.t + h - ((v - min) / (max - min)) * h;
  const bw = w / values.length;
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(pad.l, y(0));
  ctx.lineTo(pad.l + w, y(0));
  ctx.stroke();
  ctx.fillStyle = "#444";
  ctx.fillText(max.toFixed(2), 2, pad.t + 10);
  ctx.fillText(min.toFixed(2), 2, pad.t + h);
  values.forEach((v, i) => {
    const x = pad.l + i * bw;
    ctx.fillStyle = highlight(i) ? "#c0392b" : "#5b7fa6";
    if (v !== null) {
      const top = Math.min(y(v), y(0));
      ctx.fillRect(x + 2, top, Math.max(bw - 4, 1), Math.abs(y(v) - y(0)));
    }
    ctx.save();
    ctx.fillStyle = "#333";
    ctx.translate(x + bw / 2, pad.t + h + 6);
    ctx.rotate(Math.PI / 4);
    ctx.fillText(labels[i], 0, 0);
    ctx.restore();
  });
  ctx.strokeStyle = "#c0392b";
  ctx.setLineDash([4, 3]);
  for (const m of marks) {
    ctx.beginPath();
    ctx.moveTo(pad.l, y(m));
    ctx.lineTo(pad.l + w, y(m));
    ctx.stroke();
  }
  ctx.setLineDash([]);
}

function runProfile() {
  const result = JSON.parse(profileText($("text").value));
  const cats = result.categories;
  const max = Math.max(0.5, ...cats.map((c) => c.relevance));
  bars($("profile-chart"), cats.map((c) => c.code), cats.map((c) => c.relevance), {
    highlight: (i) => cats[i].dominant,
    max,
  });
  const lines = cats
    .filter((c) => c.relevance > 0)
    .map((c) => `${c.code.padEnd(10)} ${c.relevance.toFixed(3)}  (threshold ${c.threshold.toFixed(3)})${c.dominant ? "  dominant" : ""}`);
  show(
    "profile-out",
    `${result.tokens} tokens\nmost relevant: ${result.most_relevant ?? "none"}\n` + (lines.join("\n") || "no category terms found"),
  );
}

function parseCells(text) {
  const cells = /[,;]/.test(text) ? text.split(/[,;]/).map((c) => c.trim()) : text.trim().split(/\s+/);
  return cells.map((c) => (["", "-", "NA", "na"].includes(c) ? null : Number(c)));
}

function runTrend() {
  try {
    const series = $("series").value;
    const r = JSON.parse(trendTest(series, Number($("alpha").value)));
    const values = parseCells(series);
    const present = values.filter((v) => v !== null);
    bars($("trend-chart"), values.map((_, i) => String(i + 1)), values, {
      min: Math.min(0, ...present),
      max: Math.max(...present, 1e-9),
    });
    show("trend-out", `${r.symbol} ${r.direction}   S = ${r.s}   z = ${r.z.toFixed(3)}   p = ${r.p_value.toFixed(4)}   (${r.n} points)`);
  } catch (e) {
    show("trend-out", String(e.message ?? e), true);
  }
}

function runLag() {
  try {
    const r = JSON.parse(lagCorrelation($("lead").value, $("follow").value, Number($("max-lag").value)));
    const peak = r.lags.indexOf(r.peak_lag);
    bars($("lag-chart"), r.lags.map(String), r.correlations, {
      highlight: (i) => i === peak,
      min: -1,
      max: 1,
    });
    const who = r.peak_lag < 0 ? `b trails a by ${-r.peak_lag} months` : r.peak_lag > 0 ? `a trails b by ${r.peak_lag} months` : "no lead or lag";
    show("lag-out", `peak at lag ${r.peak_lag}: r = ${r.peak_correlation.toFixed(3)} (${who})`);
  } catch (e) {
    show("lag-out", String(e.message ?? e), true);
  }
}

// a noisy seasonal series and a copy of it delayed by four months
function sampleSeries() {
  const n = 48;
  const x = Array.from({ length: n + 4 }, (_, t) => Math.sin(t / 3) + 0.4 * Math.sin(t * 1.7) + 0.1 * ((t * 7919) % 13) / 13);
  $("lead").value = x.slice(4).map((v) => v.toFixed(3)).join(", ");
  $("follow").value = x.slice(0, n).map((v) => v.toFixed(3)).join(", ");
}

await init();
sampleSeries();
$("profile-run").addEventListener("click", runProfile);
$("trend-run").addEventListener("click", runTrend);
$("lag-run").addEventListener("click", runLag);
runProfile();
runTrend();
runLag();
