// @vitest-environment jsdom
//
// End-to-end against the real Python service: spawns `t2n-serve` on an
// ephemeral port, drives it through the UI modules (real fetch, DOM via
// jsdom) and checks rendering fidelity, the clarification round trip and
// ping path highlighting.

import { spawn, ChildProcess } from "node:child_process";
import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { ChatPanel } from "../src/chat.js";
import { renderTopology } from "../src/graph.js";
import { renderInspector } from "../src/inspector.js";
import { PingConsole } from "../src/ping.js";
import { SystemEventMsg } from "../src/types.js";

const here = dirname(fileURLToPath(import.meta.url));
const scenariosDir = join(here, "../../src/text2net/data/scenarios");

function scenario(name: string): string {
  return readFileSync(join(scenariosDir, `${name}.txt`), "utf-8").trim();
}

const port = 8700 + Math.floor(Math.random() * 200);
const baseUrl = `http://127.0.0.1:${port}`;
let server: ChildProcess;

async function waitForService(timeoutMs = 20000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    try {
      const resp = await fetch(`${baseUrl}/api/sessions`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ backend: "sim" }),
      });
      if (resp.ok) return;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) throw new Error("service did not come up");
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
}

beforeAll(async () => {
  server = spawn("t2n-serve", ["--port", String(port)], { stdio: "ignore" });
  await waitForService();
}, 30000);

afterAll(() => {
  server.kill();
});

function pane(): HTMLElement {
  const el = document.createElement("div");
  document.body.appendChild(el);
  return el;
}

describe("rendering fidelity against the live service", () => {
  it.each([
    ["chain_story_a", 3, 2],
    ["two_router_loopbacks", 2, 1],
  ])("%s: DOM counts equal document counts", async (name, devices, connections) => {
    const api = new ApiClient(baseUrl);
    const session = await api.createSession("sim");
    const outcome = await api.postMessage(session.session_id, scenario(name as string));
    expect(outcome.event).toBe("ProvisionDone");

    const doc = await api.getTopology(session.session_id);
    expect(doc.devices).toHaveLength(devices as number);
    expect(doc.connections).toHaveLength(connections as number);

    const el = pane();
    renderTopology(el, doc);
    expect(el.querySelectorAll("g.node")).toHaveLength(devices as number);
    expect(el.querySelectorAll("g.edge")).toHaveLength(connections as number);

    const labels = [...el.querySelectorAll(".edge-label")].map((n) => n.textContent);
    for (const device of doc.devices) {
      for (const iface of device.node_configs.basic.interfaces) {
        const label = `${iface.ipv4}/${iface.prefix_len}`;
        if (iface.is_loopback) {
          const badges = [...el.querySelectorAll(".loopback-badge")].map(
            (n) => n.textContent,
          );
          expect(badges.some((b) => b!.includes(label)), label).toBe(true);
        } else {
          expect(labels, label).toContain(label);
        }
      }
    }
  }, 20000);

  it("loopback-pair document shows two loopback badges", async () => {
    const api = new ApiClient(baseUrl);
    const session = await api.createSession("sim");
    await api.postMessage(session.session_id, scenario("two_router_loopbacks"));
    const doc = await api.getTopology(session.session_id);
    const el = pane();
    renderTopology(el, doc);
    expect(el.querySelectorAll(".loopback-badge")).toHaveLength(2);
  }, 20000);
});

describe("clarification round trip through the chat panel", () => {
  it("renders the highlighted question, then provisions on reply", async () => {
    const api = new ApiClient(baseUrl);
    const session = await api.createSession("sim");
    const container = pane();
    let provisioned = false;
    const chat = new ChatPanel(container, api, session.session_id, {
      onProvisioned: () => {
        provisioned = true;
      },
    });

    const ask = await chat.send(scenario("chain_story_vague"));
    expect(ask.event).toBe("AskClarification");
    const question = container.querySelector(".msg.clarification");
    expect(question).not.toBeNull();
    expect(question!.textContent).toContain("static routing");
    expect(question!.querySelector(".inline-reply input")).not.toBeNull();

    // answer through the inline reply box, like a user would
    const input = question!.querySelector<HTMLInputElement>(".inline-reply input")!;
    const form = question!.querySelector<HTMLFormElement>("form.inline-reply")!;
    input.value = scenario("chain_story_vague_reply");
    form.dispatchEvent(new window.Event("submit", { bubbles: true, cancelable: true }));

    const deadline = Date.now() + 10000;
    while (!provisioned && Date.now() < deadline) {
      await new Promise((resolve) => setTimeout(resolve, 100));
    }
    expect(provisioned).toBe(true);

    const doc = await api.getTopology(session.session_id);
    expect(doc.devices.map((d) => d.hostname)).toEqual(["R-1", "R-2", "R-3"]);
  }, 20000);
});

describe("ping console", () => {
  it("highlights the transit path on the graph", async () => {
    const api = new ApiClient(baseUrl);
    const session = await api.createSession("sim");
    await api.postMessage(session.session_id, scenario("three_router_transit"));
    const doc = await api.getTopology(session.session_id);

    const graphPane = pane();
    renderTopology(graphPane, doc);
    const consolePane = pane();
    const ping = new PingConsole(consolePane, api, session.session_id, graphPane);
    ping.setTopology(doc);

    const event = await ping.run("R1", "192.168.2.1");
    expect(event?.success).toBe(true);
    expect(event?.forward_path).toEqual(["R1", "R2", "R3"]);
    const highlighted = [...graphPane.querySelectorAll("g.node.on-path")].map(
      (n) => n.getAttribute("data-device"),
    );
    expect(highlighted).toEqual(["R1", "R2", "R3"]);
    expect(graphPane.querySelectorAll("g.edge.on-path")).toHaveLength(2);
    expect(consolePane.querySelector(".ping-output")?.textContent).toContain("R1 → R2 → R3");
  }, 20000);

  it("shows the failure reason after a broken probe", async () => {
    const api = new ApiClient(baseUrl);
    const session = await api.createSession("sim");
    await api.postMessage(session.session_id, scenario("two_router_loopbacks"));
    const doc = await api.getTopology(session.session_id);
    const graphPane = pane();
    renderTopology(graphPane, doc);
    const consolePane = pane();
    const ping = new PingConsole(consolePane, api, session.session_id, graphPane);
    ping.setTopology(doc);

    const event = await ping.run("R1", "203.0.113.9");
    expect(event?.success).toBe(false);
    expect(consolePane.querySelector(".failure-badge")?.textContent).toBe(
      "NoRouteForward",
    );
    expect(graphPane.querySelectorAll(".on-path")).toHaveLength(0);
  }, 20000);

  it("rejects malformed addresses client-side without a request", async () => {
    const api = new ApiClient(baseUrl);
    const session = await api.createSession("sim");
    await api.postMessage(session.session_id, scenario("single_router"));
    const graphPane = pane();
    const consolePane = pane();
    const ping = new PingConsole(consolePane, api, session.session_id, graphPane);

    const stepsBefore = (await api.getSession(session.session_id)).step_count;
    const event = await ping.run("R1", "192.168.0.300");
    expect(event).toBeNull();
    expect(consolePane.querySelector(".ping-output")?.textContent).toContain(
      "not a valid IPv4 address",
    );
    const stepsAfter = (await api.getSession(session.session_id)).step_count;
    expect(stepsAfter).toBe(stepsBefore); // nothing was sent
  }, 20000);
});

describe("live updates and inspector", () => {
  it("receives transcript events over the SSE stream", async () => {
    const api = new ApiClient(baseUrl);
    const session = await api.createSession("sim");
    const events: SystemEventMsg[] = [];
    const close = api.openEvents(session.session_id, (e) => events.push(e));
    await new Promise((resolve) => setTimeout(resolve, 300));
    await api.postMessage(session.session_id, scenario("single_router"));
    const deadline = Date.now() + 10000;
    while (!events.some((e) => e.event === "ProvisionDone") && Date.now() < deadline) {
      await new Promise((resolve) => setTimeout(resolve, 100));
    }
    close();
    const kinds = events.map((e) => e.event);
    expect(kinds).toContain("Welcome");
    expect(kinds).toContain("ProvisionDone");
  }, 20000);

  it("inspector lists interfaces and routes of the selected device", async () => {
    const api = new ApiClient(baseUrl);
    const session = await api.createSession("sim");
    await api.postMessage(session.session_id, scenario("three_router_transit"));
    const doc = await api.getTopology(session.session_id);
    const el = pane();
    renderInspector(el, doc, "R2");
    expect(el.querySelector("h3")?.textContent).toBe("R2 (router)");
    expect(el.querySelectorAll(".iface-list li")).toHaveLength(2);
    expect(el.querySelectorAll(".route-list li")).toHaveLength(2);
  }, 20000);
});
