/** Page bootstrap: one session per tab, chat on the left, graph plus
 * inspector plus ping console on the right, live updates over SSE. */

import { ApiClient } from "./api.js";
import { ChatPanel } from "./chat.js";
import { renderTopology } from "./graph.js";
import { renderInspector } from "./inspector.js";
import { PingConsole } from "./ping.js";
import { SystemEventMsg, TopologyDoc } from "./types.js";

function el(id: string): HTMLElement {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing #${id}`);
  return found;
}

export async function boot(baseUrl: string = ""): Promise<void> {
  const api = new ApiClient(baseUrl);
  const session = await api.createSession("sim");
  const phaseBadge = el("phase-badge");
  const graphContainer = el("graph");
  const inspectorContainer = el("inspector");

  phaseBadge.textContent = session.phase;

  let topology: TopologyDoc | null = null;

  const chat = new ChatPanel(el("chat"), api, session.session_id, {
    onProvisioned: () => void showTopology(),
    onEvent: () => void refreshPhase(),
  });
  const ping = new PingConsole(el("ping"), api, session.session_id, graphContainer);

  // replay any transcript the server already has (page reloads keep state)
  for (const entry of session.transcript) {
    if (entry.role === "system" && entry.event !== "Welcome") {
      chat.renderEvent({ event: entry.event, text: entry.text });
    } else if (entry.role === "system") {
      chat.addEntry("system", entry.text);
    } else {
      chat.addEntry("user", entry.text);
    }
  }
  if (session.topology) {
    topology = session.topology;
    paint(topology);
  }

  async function refreshPhase(): Promise<void> {
    const current = await api.getSession(session.session_id);
    phaseBadge.textContent = current.phase;
  }

  async function showTopology(): Promise<void> {
    topology = await api.getTopology(session.session_id);
    paint(topology);
  }

  function paint(doc: TopologyDoc): void {
    const model = renderTopology(graphContainer, doc);
    ping.setTopology(doc);
    if (model && model.nodes.length) {
      renderInspector(inspectorContainer, doc, model.nodes[0].hostname);
    }
    graphContainer.addEventListener("click", (event) => {
      const target = (event.target as Element).closest("g.node");
      if (target && topology) {
        renderInspector(
          inspectorContainer, topology, target.getAttribute("data-device") ?? "",
        );
      }
    });
  }

  const input = el("scenario-input") as HTMLTextAreaElement;
  const form = el("scenario-form") as HTMLFormElement;
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const text = input.value.trim();
    if (!text) return;
    input.value = "";
    void chat.send(text);
  });

  api.openEvents(session.session_id, (event: SystemEventMsg) => {
    // the SSE channel covers updates made outside this tab
    if (event.event === "Welcome") return;
    void refreshPhase();
  });
}

if (typeof document !== "undefined" && document.getElementById("chat")) {
  void boot();
}
