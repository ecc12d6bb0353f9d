import init, { fixtureNames, fixtureTriples, fixtureScene, findAnalogies, blendSvg, Evolution } from "./pkg/visual_blender_web.js";

const $ = (id) => document.getElementById(id);
let running = null;

function status(text, error = false) {
  $("status").textContent = text;
  $("status").className = error ? "error" : "";
}

function inputs() {
  return [$("left-triples").value, $("left-scene").value, $("right-triples").value, $("right-scene").value];
}

function load(side, name) {
  $(`${side}-triples`).value = fixtureTriples(name);
  $(`${side}-scene`).value = fixtureScene(name);
}

function guard(f) {
  return () => {
    try {
      f();
    } catch (e) {
      status(String(e.message ?? e), true);
    }
  };
}

function map() {
  const set = JSON.parse(findAnalogies(...inputs()));
  const pick = $("analogy");
  pick.innerHTML = "";
  set.analogies.forEach((a, i) => {
    const opt = document.createElement("option");
    opt.value = i;
    opt.textContent = a.mappings.map(([l, r]) => `${l}=${r}`).join(", ");
    pick.append(opt);
  });
  status(`${set.analogies.length} analogies between ${set.left} and ${set.right}`);
}

function analogyIndex() {
  if ($("analogy").options.length === 0) map();
  return Number($("analogy").value || 0);
}

function blend() {
  const seed = Number($("seed").value);
  $("out").innerHTML = blendSvg(...inputs(), analogyIndex(), $("base-right").checked, seed);
  $("seed").value = seed + 1;
  status("blend drawn; press again for another seed");
}

function stop() {
  if (running) {
    running.free();
    running = null;
  }
  $("stop").disabled = true;
}

function evolve() {
  stop();
  running = new Evolution(...inputs(), analogyIndex(), Number($("seed").value), 30);
  $("stop").disabled = false;
  const tick = () => {
    if (!running) return;
    try {
      running.step(1);
    } catch (e) {
      status(String(e.message ?? e), true);
      stop();
      return;
    }
    $("out").innerHTML = running.bestSvg();
    status(`generation ${running.generation}  best ${running.bestFitness.toFixed(3)}  mean ${running.meanFitness.toFixed(3)}`);
    if (running.generation < 100) requestAnimationFrame(tick);
    else stop();
  };
  requestAnimationFrame(tick);
}

await init();
for (const side of ["left", "right"]) {
  const pick = $(`${side}-pick`);
  for (const name of fixtureNames()) pick.append(new Option(name, name));
  pick.addEventListener("change", () => {
    load(side, pick.value);
    $("analogy").innerHTML = "";
  });
}
$("right-pick").value = "angel";
load("left", "pig");
load("right", "angel");
$("map").addEventListener("click", guard(map));
$("blend").addEventListener("click", guard(blend));
$("evolve").addEventListener("click", guard(evolve));
$("stop").addEventListener("click", stop);
guard(map)();
