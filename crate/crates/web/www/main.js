import init, { simulate, verify_case, list_cases, derive_density } from "./pkg/kawahara_web.js";

const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

function formValues(form) {
  return Object.fromEntries(new FormData(form).entries());
}

function call(fn, ...args) {
  const out = JSON.parse(fn(...args));
  if (out && out.error) throw new Error(out.error);
  return out;
}

function axes(ctx, w, h, pad) {
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
}

function polyline(ctx, xs, ys, sx, sy) {
  ctx.beginPath();
  xs.forEach((x, i) => (i ? ctx.lineTo(sx(x), sy(ys[i])) : ctx.moveTo(sx(x), sy(ys[i]))));
  ctx.stroke();
}

function plotProfiles(canvas, x, frames) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 30;
  axes(ctx, w, h, pad);
  const all = frames.flatMap((f) => f.u);
  const lo = Math.min(...all), hi = Math.max(...all);
  const span = hi - lo || 1;
  const sx = (v) => pad + ((w - 2 * pad) * v) / x[x.length - 1];
  const sy = (v) => h - pad - ((h - 2 * pad) * (v - lo)) / span;
  frames.forEach((f, i) => {
    ctx.strokeStyle = `rgba(31, 119, 180, ${0.15 + (0.85 * i) / Math.max(frames.length - 1, 1)})`;
    polyline(ctx, x, f.u, sx, sy);
  });
  ctx.fillStyle = "#333";
  ctx.fillText(hi.toPrecision(3), 2, pad);
  ctx.fillText(lo.toPrecision(3), 2, h - pad);
  ctx.fillText(`t = ${frames[frames.length - 1].t.toPrecision(3)}`, w - pad - 60, pad - 8);
}

function plotDrift(canvas, t, names, drift) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 30;
  axes(ctx, w, h, pad);
  const floor = 1e-17;
  const logs = drift.map((d) => d.map((v) => Math.log10(Math.max(v, floor))));
  const lo = Math.floor(Math.min(...logs.flat())), hi = Math.ceil(Math.max(...logs.flat(), lo + 1));
  const sx = (v) => pad + ((w - 2 * pad) * v) / t[t.length - 1];
  const sy = (v) => h - pad - ((h - 2 * pad) * (v - lo)) / (hi - lo);
  logs.forEach((ys, i) => {
    ctx.strokeStyle = COLORS[i % COLORS.length];
    polyline(ctx, t, ys, sx, sy);
    ctx.fillStyle = ctx.strokeStyle;
    ctx.fillText(names[i], w - pad - 40, pad + 14 * (i + 1));
  });
  ctx.fillStyle = "#333";
  ctx.fillText(`1e${hi}`, 2, pad);
  ctx.fillText(`1e${lo}`, 2, h - pad);
}

function runSimulation(ev) {
  ev.preventDefault();
  const status = document.getElementById("sim-status");
  const v = formValues(ev.target);
  const req = {
    a: v.a, b: v.b, c: v.c, f: v.f, u0: v.u0,
    n: Number(v.n), dt: Number(v.dt), t_end: Number(v.t_end), c3: v.c3 === "on",
  };
  status.className = "status";
  status.textContent = "running...";
  setTimeout(() => {
    try {
      const t0 = performance.now();
      const r = call(simulate, JSON.stringify(req));
      plotProfiles(document.getElementById("profile"), r.x, r.frames);
      plotDrift(document.getElementById("drift"), r.t, r.monitors, r.drift);
      const maxima = r.monitors.map((m, i) => `${m} ${Math.max(...r.drift[i]).toExponential(2)}`);
      status.textContent = `done in ${(performance.now() - t0).toFixed(0)} ms; max drift ${maxima.join(", ")}`;
      const link = document.getElementById("csv");
      link.href = URL.createObjectURL(new Blob([r.csv], { type: "text/csv" }));
      link.hidden = false;
    } catch (e) {
      status.className = "status error";
      status.textContent = e.message;
    }
  }, 10);
}

function runVerify(ev) {
  ev.preventDefault();
  const out = document.getElementById("verify-out");
  const v = formValues(ev.target);
  const [id, variant] = v.case.split("/");
  try {
    const r = call(verify_case, id, variant, v.bindings);
    const lines = [`${r.case} (${variant}): ${r.status}`, r.interpretation];
    if (r.note) lines.push(`note: ${r.note}`);
    for (const c of r.checks) {
      lines.push(`  ${c.name}: ${c.status}${c.residual ? "\n    " + c.residual : ""}`);
    }
    out.className = "";
    out.textContent = lines.join("\n");
  } catch (e) {
    out.className = "error";
    out.textContent = e.message;
  }
}

function runDerive(ev) {
  ev.preventDefault();
  const out = document.getElementById("derive-out");
  const v = formValues(ev.target);
  try {
    const r = call(derive_density, v.q, v.base, v.b, v.c, v.f);
    out.className = "";
    out.textContent = [
      `T = ${r.density}`,
      `X = ${r.flux}`,
      `D_t T + D_x X = ${r.divergence}`,
      `euler(T) - Q = ${r.euler_minus_q}`,
    ].join("\n");
  } catch (e) {
    out.className = "error";
    out.textContent = e.message;
  }
}

await init();
const select = document.querySelector("#verify select[name=case]");
for (const c of call(list_cases)) {
  const opt = document.createElement("option");
  opt.value = `${c.id}/${c.variant}`;
  opt.textContent = `${c.id} ${c.variant} (${c.kind})`;
  select.append(opt);
}
document.getElementById("sim").addEventListener("submit", runSimulation);
document.getElementById("verify").addEventListener("submit", runVerify);
document.getElementById("derive").addEventListener("submit", runDerive);
