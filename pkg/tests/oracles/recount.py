"""Recount analytics straight from a serialized graph file (JSON lines), without the package."""

import json

LAYERS = ["Source", "Pollutant", "Medium", "ExposureRoute", "Organ", "Disease"]
CHAIN = ["emits", "contaminates", "consumed_through", "affects", "causes"]


def read(path):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    recs = [json.loads(line) for line in text.splitlines() if line.strip()]
    return recs[0], recs[1:]


def _active(records):
    return [r for r in records if r.get("kind") == "edge" and r["status"] == "active"]


def _live_paths(records):
    active = {(tuple(r["src"]), r["rel"], tuple(r["dst"])) for r in _active(records)}
    paths = []
    for r in records:
        if r.get("kind") != "metapath":
            continue
        nodes = [tuple(n) for n in r["nodes"]]
        if all((nodes[i], CHAIN[i], nodes[i + 1]) in active for i in range(5)):
            paths.append([n[1] for n in nodes])
    return paths


def summary(path):
    _, records = read(path)
    nodes = [r for r in records if r.get("kind") == "node"]
    per_layer = {layer: 0 for layer in LAYERS}
    for n in nodes:
        per_layer[n["layer"]] += 1
    return {
        "nodes_per_layer": per_layer,
        "edge_count": len(_active(records)),
        "metapath_count": len(_live_paths(records)),
        "pollutant_count": sum(1 for n in nodes if n["layer"] == "Pollutant" and not n["name"].startswith("unknown ")),
        "placeholder_count": sum(1 for n in nodes if n["name"].startswith("unknown ")),
    }


def cooccurrence_tsv(path, layer_a, layer_b):
    _, records = read(path)
    ia, ib = LAYERS.index(layer_a), LAYERS.index(layer_b)
    cells = {}
    for p in _live_paths(records):
        key = (p[ia], p[ib])
        cells[key] = cells.get(key, 0) + 1
    row_tot, col_tot = {}, {}
    for (a, b), c in cells.items():
        row_tot[a] = row_tot.get(a, 0) + c
        col_tot[b] = col_tot.get(b, 0) + c
    rows = sorted(row_tot, key=lambda a: (-row_tot[a], a))
    cols = sorted(col_tot, key=lambda b: (-col_tot[b], b))
    lines = ["\t".join([f"{layer_a}\\{layer_b}"] + cols)]
    for a in rows:
        lines.append("\t".join([a] + [str(cells.get((a, b), 0)) for b in cols]))
    return "\n".join(lines) + "\n"


def emerging_tsv(path, year_cut):
    _, records = read(path)
    rows = []
    for r in _active(records):
        years = [y for _, y in r["provenance"]]
        if years and min(years) > year_cut:
            rows.append((min(years), r["src"][1], r["rel"], r["dst"][1], r["src"][0], r["dst"][0]))
    rows.sort()
    out = ["src_layer\tsrc\trelation\tdst_layer\tdst\tfirst_year"]
    out += [f"{sl}\t{s}\t{rel}\t{dl}\t{d}\t{y}" for y, s, rel, d, sl, dl in rows]
    return "\n".join(out) + "\n"
