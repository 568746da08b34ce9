/** Topology graph: model derived purely from the served document, a
 * deterministic layered layout seeded by hostname sort, and SVG
 * rendering with path highlighting for ping results. */

import {
  ConnectionInfo,
  DeviceInfo,
  InterfaceInfo,
  SCHEMA_VERSION,
  TopologyDoc,
} from "./types.js";

export interface GraphNode {
  hostname: string;
  nodeType: string;
  loopbacks: InterfaceInfo[];
  x: number;
  y: number;
}

export interface GraphEdgeEnd {
  device: string;
  iface: string;
  address: string;
}

export interface GraphEdge {
  networkId: number;
  a: GraphEdgeEnd;
  b: GraphEdgeEnd;
}

export interface GraphModel {
  nodes: GraphNode[];
  edges: GraphEdge[];
}

function interfaceOf(device: DeviceInfo, name: string): InterfaceInfo | undefined {
  return device.node_configs.basic.interfaces.find((iface) => iface.name === name);
}

/** Build the view model. No inference: everything comes from the doc. */
export function buildGraphModel(doc: TopologyDoc): GraphModel {
  const byName = new Map(doc.devices.map((device) => [device.hostname, device]));
  const nodes: GraphNode[] = [...doc.devices]
    .sort((a, b) => a.hostname.localeCompare(b.hostname))
    .map((device) => ({
      hostname: device.hostname,
      nodeType: device.node_type,
      loopbacks: device.node_configs.basic.interfaces.filter((i) => i.is_loopback),
      x: 0,
      y: 0,
    }));

  const edges: GraphEdge[] = doc.connections.map((conn: ConnectionInfo) => {
    const end = (device: string, iface: string): GraphEdgeEnd => {
      const info = byName.get(device);
      const ifaceInfo = info ? interfaceOf(info, iface) : undefined;
      const address = ifaceInfo ? `${ifaceInfo.ipv4}/${ifaceInfo.prefix_len}` : "?";
      return { device, iface, address };
    };
    return {
      networkId: conn.network_id,
      a: end(conn.endpoint_a.device, conn.endpoint_a.interface),
      b: end(conn.endpoint_b.device, conn.endpoint_b.interface),
    };
  });

  layeredLayout(nodes, edges);
  return { nodes, edges };
}

const X_STEP = 180;
const Y_STEP = 120;
const MARGIN = 80;

/** Force-free layered layout: BFS layers from the first hostname in sort
 * order, members of a layer stacked in sort order. Pure function of the
 * document, so two renders of the same topology are pixel-identical. */
export function layeredLayout(nodes: GraphNode[], edges: GraphEdge[]): void {
  const neighbors = new Map<string, string[]>();
  for (const node of nodes) neighbors.set(node.hostname, []);
  for (const edge of edges) {
    neighbors.get(edge.a.device)?.push(edge.b.device);
    neighbors.get(edge.b.device)?.push(edge.a.device);
  }
  for (const list of neighbors.values()) list.sort();

  const layer = new Map<string, number>();
  for (const start of nodes.map((n) => n.hostname)) {
    if (layer.has(start)) continue;
    layer.set(start, 0);
    const queue = [start];
    while (queue.length) {
      const current = queue.shift()!;
      for (const next of neighbors.get(current) ?? []) {
        if (!layer.has(next)) {
          layer.set(next, (layer.get(current) ?? 0) + 1);
          queue.push(next);
        }
      }
    }
  }

  const perLayer = new Map<number, number>();
  for (const node of nodes) {
    const l = layer.get(node.hostname) ?? 0;
    const row = perLayer.get(l) ?? 0;
    perLayer.set(l, row + 1);
    node.x = MARGIN + l * X_STEP;
    node.y = MARGIN + row * Y_STEP;
  }
}

const SVG_NS = "http://www.w3.org/2000/svg";

function svgEl<K extends string>(name: K, attrs: Record<string, string>): Element {
  const el = document.createElementNS(SVG_NS, name);
  for (const [key, value] of Object.entries(attrs)) el.setAttribute(key, value);
  return el;
}

/** Render the document into the container. Returns the model when drawn,
 * or null when the schema is unsupported (banner + raw JSON fallback) or
 * the topology is empty (empty-state message). */
export function renderTopology(container: HTMLElement, doc: TopologyDoc): GraphModel | null {
  container.textContent = "";

  if (doc.schema !== SCHEMA_VERSION) {
    const banner = document.createElement("div");
    banner.className = "schema-banner";
    banner.textContent =
      `Unsupported topology schema "${doc.schema}" (expected "${SCHEMA_VERSION}").` +
      " Showing raw document.";
    const raw = document.createElement("pre");
    raw.className = "raw-fallback";
    raw.textContent = JSON.stringify(doc, null, 2);
    container.append(banner, raw);
    return null;
  }

  if (doc.devices.length === 0) {
    const empty = document.createElement("div");
    empty.className = "empty-state";
    empty.textContent = "Nothing here yet. Describe a network to get started.";
    container.append(empty);
    return null;
  }

  const model = buildGraphModel(doc);
  const width = Math.max(...model.nodes.map((n) => n.x)) + MARGIN;
  const height = Math.max(...model.nodes.map((n) => n.y)) + MARGIN;
  const svg = svgEl("svg", {
    viewBox: `0 0 ${width} ${height}`,
    width: String(width),
    height: String(height),
    "data-role": "topology-graph",
  });

  const position = new Map(model.nodes.map((n) => [n.hostname, n]));
  for (const edge of model.edges) {
    const a = position.get(edge.a.device)!;
    const b = position.get(edge.b.device)!;
    const group = svgEl("g", {
      class: "edge",
      "data-network-id": String(edge.networkId),
      "data-devices": `${edge.a.device}|${edge.b.device}`,
    });
    group.appendChild(
      svgEl("line", {
        x1: String(a.x), y1: String(a.y), x2: String(b.x), y2: String(b.y),
        class: "edge-line",
      }),
    );
    const labelA = svgEl("text", {
      x: String(a.x + (b.x - a.x) * 0.25),
      y: String(a.y + (b.y - a.y) * 0.25 - 8),
      class: "edge-label",
    });
    labelA.textContent = edge.a.address;
    const labelB = svgEl("text", {
      x: String(a.x + (b.x - a.x) * 0.75),
      y: String(a.y + (b.y - a.y) * 0.75 - 8),
      class: "edge-label",
    });
    labelB.textContent = edge.b.address;
    group.append(labelA, labelB);
    svg.appendChild(group);
  }

  for (const node of model.nodes) {
    const group = svgEl("g", { class: "node", "data-device": node.hostname });
    group.appendChild(
      svgEl("circle", {
        cx: String(node.x), cy: String(node.y), r: "26",
        class: `node-glyph node-${node.nodeType}`,
      }),
    );
    const label = svgEl("text", {
      x: String(node.x), y: String(node.y + 4),
      class: "node-label", "text-anchor": "middle",
    });
    label.textContent = node.hostname;
    group.appendChild(label);
    node.loopbacks.forEach((loopback, index) => {
      const badge = svgEl("text", {
        x: String(node.x),
        y: String(node.y + 44 + index * 14),
        class: "loopback-badge",
        "text-anchor": "middle",
      });
      badge.textContent = `${loopback.name} ${loopback.ipv4}/${loopback.prefix_len}`;
      group.appendChild(badge);
    });
    svg.appendChild(group);
  }

  container.appendChild(svg);
  return model;
}

/** Highlight the edges and nodes along a ping's hostname path. Returns
 * the number of edges marked. */
export function highlightPath(container: HTMLElement, path: string[]): number {
  clearHighlight(container);
  for (const hostname of path) {
    container
      .querySelector(`g.node[data-device="${hostname}"]`)
      ?.classList.add("on-path");
  }
  let marked = 0;
  for (let i = 0; i + 1 < path.length; i++) {
    const pair = new Set([path[i], path[i + 1]]);
    for (const edge of container.querySelectorAll("g.edge")) {
      const [a, b] = (edge.getAttribute("data-devices") ?? "|").split("|");
      if (pair.has(a) && pair.has(b)) {
        edge.classList.add("on-path");
        marked += 1;
      }
    }
  }
  return marked;
}

export function clearHighlight(container: HTMLElement): void {
  for (const el of container.querySelectorAll(".on-path")) {
    el.classList.remove("on-path");
  }
}
