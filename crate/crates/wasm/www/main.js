import init, { explore, simulate, analyze } from "./pkg/fvbm_wasm.js";

const PRESET = {
  labels: ["ALP", "AG", "NXT", "PHON", "LDP", "JLN", "DHJP", "CULL"],
  params: {
    d: 8,
    bias: [-0.321, -1.037, -0.209, 0.941, 0.384, -0.559, 0.693, -0.383],
    interaction_upper: [
      -0.203, -0.185, -0.37, 0.173, 0.321, 0.059, 0.042, -0.284, 0.147, -0.053, 0.626, 0.601, -0.71, 0.371,
      -0.208, 0.419, 0.808, -0.146, 0.512, 0.394, -0.498, 1.287, 0.024, 0.224, 0.116, 0.077, 0.397, 0.801,
    ],
  },
};

const $ = (id) => document.getElementById(id);

function guarded(errorId, action) {
  return () => {
    $(errorId).textContent = "";
    try {
      action();
    } catch (e) {
      $(errorId).textContent = String(e);
    }
  };
}

function context(canvas) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.font = "12px system-ui, sans-serif";
  return ctx;
}

function drawMarginals(canvas, labels, marginals) {
  const ctx = context(canvas);
  const left = 30, bottom = canvas.height - 24, top = 10;
  const width = (canvas.width - left - 10) / labels.length;
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(left, top);
  ctx.lineTo(left, bottom);
  ctx.lineTo(canvas.width - 10, bottom);
  ctx.stroke();
  const y = (p) => bottom - p * (bottom - top);
  ctx.setLineDash([4, 4]);
  ctx.beginPath();
  ctx.moveTo(left, y(0.5));
  ctx.lineTo(canvas.width - 10, y(0.5));
  ctx.stroke();
  ctx.setLineDash([]);
  ctx.fillStyle = "#444";
  ctx.textAlign = "right";
  for (const p of [0, 0.5, 1]) ctx.fillText(p.toFixed(1), left - 4, y(p) + 4);
  ctx.textAlign = "center";
  marginals.forEach((p, j) => {
    const x = left + j * width + width * 0.15;
    ctx.fillStyle = p >= 0.5 ? "#3060c0" : "#c04040";
    ctx.fillRect(x, y(p), width * 0.7, bottom - y(p));
    ctx.fillStyle = "#222";
    ctx.fillText(labels[j], x + width * 0.35, bottom + 15);
    ctx.fillText(p.toFixed(3), x + width * 0.35, y(p) - 4);
  });
}

function drawConcordance(canvas, labels, matrix) {
  const ctx = context(canvas);
  const d = labels.length, margin = 44;
  const cell = (canvas.width - margin - 4) / d;
  ctx.textAlign = "center";
  ctx.textBaseline = "middle";
  for (let j = 0; j < d; j++) {
    for (let k = 0; k < d; k++) {
      const c = matrix[j][k];
      // white at 0.5, blue towards agreement, red towards disagreement
      const t = Math.min(1, Math.abs(c - 0.5) * 2);
      const shade = Math.round(255 * (1 - t));
      ctx.fillStyle = c >= 0.5 ? `rgb(${shade},${shade},255)` : `rgb(255,${shade},${shade})`;
      ctx.fillRect(margin + k * cell, margin + j * cell, cell - 1, cell - 1);
      if (j !== k && cell > 30) {
        ctx.fillStyle = t > 0.6 ? "#fff" : "#222";
        ctx.fillText(c.toFixed(2), margin + (k + 0.5) * cell, margin + (j + 0.5) * cell);
      }
    }
    ctx.fillStyle = "#222";
    ctx.fillText(labels[j], margin + (j + 0.5) * cell, margin / 2);
    ctx.textAlign = "right";
    ctx.fillText(labels[j], margin - 4, margin + (j + 0.5) * cell);
    ctx.textAlign = "center";
  }
}

function fillStates(table, labels, states) {
  const head = "<tr>" + labels.map((l) => `<th>${l}</th>`).join("") + "<th>P</th></tr>";
  const rows = states.map(
    (s) => "<tr>" + s.spins.map((x) => `<td>${x > 0 ? "+" : "−"}</td>`).join("") + `<td>${s.probability.toFixed(4)}</td></tr>`,
  );
  table.innerHTML = head + rows.join("");
}

const NODE_RGB = { positive_significant: "0,0,255", negative_significant: "255,0,0", insignificant: "128,128,128" };
const EDGE_COLOR = { 1: "blue", "-1": "red", 0: "grey" };

function drawNetwork(canvas, network) {
  const ctx = context(canvas);
  const d = network.nodes.length;
  const cx = canvas.width / 2, cy = canvas.height / 2, r = canvas.width / 2 - 50;
  const at = (j) => [cx + r * Math.cos(-Math.PI / 2 + (2 * Math.PI * j) / d), cy + r * Math.sin(-Math.PI / 2 + (2 * Math.PI * j) / d)];
  for (const e of network.edges) {
    const [x1, y1] = at(e.source), [x2, y2] = at(e.target);
    ctx.strokeStyle = EDGE_COLOR[e.sign];
    ctx.lineWidth = Math.max(0.5, e.thickness);
    ctx.setLineDash(e.significant ? [] : [6, 5]);
    ctx.globalAlpha = e.significant ? 1 : 0.5;
    ctx.beginPath();
    ctx.moveTo(x1, y1);
    ctx.lineTo(x2, y2);
    ctx.stroke();
  }
  ctx.setLineDash([]);
  ctx.globalAlpha = 1;
  ctx.lineWidth = 1.5;
  ctx.textAlign = "center";
  ctx.textBaseline = "middle";
  network.nodes.forEach((n, j) => {
    const [x, y] = at(j);
    ctx.fillStyle = "#fff";
    ctx.beginPath();
    ctx.arc(x, y, 24, 0, 2 * Math.PI);
    ctx.fill();
    ctx.fillStyle = `rgba(${NODE_RGB[n.decision]},${n.opacity})`;
    ctx.strokeStyle = `rgb(${NODE_RGB[n.decision]})`;
    ctx.fill();
    ctx.stroke();
    ctx.fillStyle = n.opacity > 0.6 && n.decision !== "insignificant" ? "#fff" : "#111";
    ctx.fillText(n.label, x, y);
  });
}

function runExplore() {
  const result = JSON.parse(explore($("params").value));
  $("logz").textContent = `log z = ${result.log_normalization_constant.toFixed(6)}`;
  drawMarginals($("marginals"), result.labels, result.marginals);
  drawConcordance($("concordance"), result.labels, result.concordance);
  fillStates($("states"), result.labels, result.top_states);
}

function runSimulate() {
  const n = Number($("n").value), seed = Number($("seed").value);
  if (!Number.isInteger(n) || n < 1) throw "n must be a positive integer";
  if (!Number.isInteger(seed) || seed < 0 || seed > 0xffffffff) throw "seed must be an integer in [0, 2^32)";
  $("data").value = simulate($("params").value, n, seed);
  $("sim-info").textContent = `${n} rows drawn; analyze them below`;
}

function runAnalyze() {
  const level = Number($("level").value);
  const result = JSON.parse(analyze($("data").value, $("fdr").value, $("mode").value, level));
  const fit = result.fit;
  $("fit-info").textContent =
    `${fit.converged ? "converged" : "not converged"} after ${fit.iterations_used} sweeps; ` +
    `${result.network.edges.filter((e) => e.significant).length} of ${result.network.edges.length} edges significant`;
  drawNetwork($("network"), result.network);
  $("tables").textContent = result.tables;
  $("dot").textContent = result.dot;
}

function resetPreset() {
  $("params").value = JSON.stringify(PRESET, null, 1);
}

await init();
resetPreset();
$("explore").addEventListener("click", guarded("explore-error", runExplore));
$("reset").addEventListener("click", guarded("explore-error", () => { resetPreset(); runExplore(); }));
$("simulate").addEventListener("click", guarded("simulate-error", runSimulate));
$("analyze").addEventListener("click", guarded("analyze-error", runAnalyze));
$("mode").addEventListener("change", () => { $("level").value = $("mode").value === "fdr" ? "0.10" : "0.05"; });
$("file").addEventListener("change", async (event) => {
  const file = event.target.files[0];
  if (file) $("data").value = await file.text();
});
guarded("explore-error", runExplore)();
