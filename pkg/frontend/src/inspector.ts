/** Device inspector: identity, interfaces and static routes of one device. */

import { TopologyDoc } from "./types.js";

export function renderInspector(
  container: HTMLElement,
  doc: TopologyDoc,
  hostname: string,
): void {
  container.textContent = "";
  const device = doc.devices.find((d) => d.hostname === hostname);
  if (!device) {
    container.textContent = `No device named ${hostname}.`;
    return;
  }

  const title = document.createElement("h3");
  title.textContent = `${device.hostname} (${device.node_type})`;
  container.appendChild(title);

  const ifaceList = document.createElement("ul");
  ifaceList.className = "iface-list";
  for (const iface of device.node_configs.basic.interfaces) {
    const item = document.createElement("li");
    const net = iface.network_id === null ? "" : ` · net${iface.network_id}`;
    item.textContent = `${iface.name} ${iface.ipv4}/${iface.prefix_len}${net}`;
    if (iface.is_loopback) item.classList.add("loopback");
    ifaceList.appendChild(item);
  }
  container.appendChild(ifaceList);

  const routes = device.node_configs.L3.static_routes;
  const routesTitle = document.createElement("h4");
  routesTitle.textContent = routes.length ? "Static routes" : "No static routes";
  container.appendChild(routesTitle);
  if (routes.length) {
    const routeList = document.createElement("ul");
    routeList.className = "route-list";
    for (const route of routes) {
      const item = document.createElement("li");
      const hop = route.resolved_next_hop ? ` (next hop ${route.resolved_next_hop})` : "";
      item.textContent = `${route.destination ?? "?"} via ${route.via ?? "?"}${hop}`;
      routeList.appendChild(item);
    }
    container.appendChild(routeList);
  }
}
