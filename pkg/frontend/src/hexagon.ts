// Client-side hexagon diagram: one hexagon per object with the six factor
// vertices at its corners, one edge per causal path from the source
// object's vertex to the target object's vertex. Rendered as SVG straight
// from the project document; edge style tracks the stored classification.

import { clear, svgEl } from "./dom.js";
import type { Classification, Factor, ProjectDoc } from "./types.js";
import { FACTORS } from "./types.js";

const WIDTH = 720;
const HEIGHT = 520;
const HEX_RADIUS = 46;

const EDGE_CLASS: Record<Classification, string> = {
  Definite: "edge-definite",
  Plausible: "edge-plausible",
  Discharged: "edge-discharged",
};

const EDGE_DASH: Record<Classification, string> = {
  Definite: "",
  Plausible: "7 5",
  Discharged: "2 4",
};

function vertexAngle(factor: Factor): number {
  // H at the top, then clockwise O, T, P, I, E
  const index = FACTORS.indexOf(factor);
  return (-90 + index * 60) * (Math.PI / 180);
}

function vertexPoint(cx: number, cy: number, factor: Factor): [number, number] {
  const angle = vertexAngle(factor);
  return [cx + HEX_RADIUS * Math.cos(angle), cy + HEX_RADIUS * Math.sin(angle)];
}

export function renderDiagram(
  container: Element,
  project: ProjectDoc,
  layout: Map<string, { cx: number; cy: number }>,
): void {
  clear(container);
  const svg = svgEl("svg", {
    viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
    class: "hotpie-diagram",
    role: "img",
  });

  // keep cached positions; only place objects the cache has not seen yet
  const total = project.objects.length;
  project.objects.forEach((obj, i) => {
    if (!layout.has(obj.id)) {
      const angle = (i / Math.max(total, 1)) * 2 * Math.PI - Math.PI / 2;
      layout.set(obj.id, {
        cx: WIDTH / 2 + (WIDTH / 2 - HEX_RADIUS - 60) * Math.cos(angle),
        cy: HEIGHT / 2 + (HEIGHT / 2 - HEX_RADIUS - 40) * Math.sin(angle),
      });
    }
  });

  for (const path of project.paths) {
    const from = layout.get(path.source.object);
    const to = layout.get(path.target.object);
    if (!from || !to) continue;
    const [x1, y1] = vertexPoint(from.cx, from.cy, path.source.primary);
    const [x2, y2] = vertexPoint(to.cx, to.cy, path.target.primary);
    const line = svgEl("line", {
      x1: String(x1),
      y1: String(y1),
      x2: String(x2),
      y2: String(y2),
      class: `edge ${EDGE_CLASS[path.classification]}`,
      "data-path-id": path.id,
      stroke: "#456",
      "stroke-width": "2",
    });
    const dash = EDGE_DASH[path.classification];
    if (dash) line.setAttribute("stroke-dasharray", dash);
    svg.append(line);
    svg.append(
      svgEl(
        "text",
        {
          x: String((x1 + x2) / 2),
          y: String((y1 + y2) / 2 - 4),
          class: "edge-label",
          "font-size": "10",
          "text-anchor": "middle",
        },
        [path.keywords.join(", ")],
      ),
    );
  }

  for (const obj of project.objects) {
    const pos = layout.get(obj.id)!;
    const corners = FACTORS.map((f) => vertexPoint(pos.cx, pos.cy, f));
    svg.append(
      svgEl("polygon", {
        points: corners.map(([x, y]) => `${x},${y}`).join(" "),
        class: "hexagon",
        "data-object-id": obj.id,
        fill: "#f4f7fb",
        stroke: "#333",
      }),
    );
    for (const factor of FACTORS) {
      const [vx, vy] = vertexPoint(pos.cx, pos.cy, factor);
      svg.append(
        svgEl("circle", {
          cx: String(vx),
          cy: String(vy),
          r: "3",
          class: "vertex",
          "data-factor": factor,
          fill: "#333",
        }),
      );
      const outX = pos.cx + (vx - pos.cx) * 1.26;
      const outY = pos.cy + (vy - pos.cy) * 1.26;
      svg.append(
        svgEl(
          "text",
          {
            x: String(outX),
            y: String(outY + 3),
            class: "vertex-label",
            "font-size": "10",
            "text-anchor": "middle",
          },
          [factor[0]],
        ),
      );
    }
    svg.append(
      svgEl(
        "text",
        {
          x: String(pos.cx),
          y: String(pos.cy + 4),
          class: "object-label",
          "font-size": "11",
          "font-weight": "600",
          "text-anchor": "middle",
        },
        [obj.name],
      ),
    );
  }

  container.append(svg);
}
