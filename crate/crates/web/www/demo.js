import init, { classifyQuadruple, hyperellipticConfiguration, thetaConstants } from "./pkg/thetanull_web.js";

const $ = (id) => document.getElementById(id);

function show(out, f) {
  out.classList.remove("error");
  try {
    out.textContent = JSON.stringify(JSON.parse(f()), null, 2);
  } catch (e) {
    out.classList.add("error");
    out.textContent = String(e);
  }
}

function thetaTable(json) {
  const table = $("theta-table");
  table.replaceChildren();
  const head = table.insertRow();
  for (const h of ["k", "parity", "|θ|", "bound"]) head.insertCell().textContent = h;
  for (const v of JSON.parse(json).values) {
    const row = table.insertRow();
    row.insertCell().textContent = v.k.join("");
    row.insertCell().textContent = v.parity;
    row.insertCell().textContent = v.abs.toExponential(6);
    row.insertCell().textContent = v.bound.toExponential(2);
  }
}

await init();
$("status").textContent = "Ready.";

$("quad-run").onclick = () => show($("quad-output"), () => classifyQuadruple($("quad-input").value));

$("hyp-run").onclick = () =>
  show($("hyp-output"), () => hyperellipticConfiguration(Number($("hyp-genus").value), $("hyp-points").value));

$("theta-run").onclick = () =>
  show($("theta-output"), () => {
    const json = thetaConstants($("theta-input").value, Number($("theta-eps").value));
    thetaTable(json);
    return json;
  });
