/** Ping console: run reachability probes and paint the path onto the
 * graph. Malformed addresses are rejected client-side, before any
 * request goes out. */

import { ApiClient, ApiError, isValidIpv4 } from "./api.js";
import { clearHighlight, highlightPath } from "./graph.js";
import { SystemEventMsg, TopologyDoc } from "./types.js";

export class PingConsole {
  readonly form: HTMLFormElement;
  readonly hostSelect: HTMLSelectElement;
  readonly addressInput: HTMLInputElement;
  readonly output: HTMLElement;

  constructor(
    readonly container: HTMLElement,
    readonly api: ApiClient,
    readonly sessionId: string,
    readonly graphContainer: HTMLElement,
  ) {
    this.form = document.createElement("form");
    this.form.className = "ping-form";
    this.hostSelect = document.createElement("select");
    this.addressInput = document.createElement("input");
    this.addressInput.type = "text";
    this.addressInput.placeholder = "destination address";
    const run = document.createElement("button");
    run.type = "submit";
    run.textContent = "Ping";
    this.output = document.createElement("div");
    this.output.className = "ping-output";
    this.form.append(this.hostSelect, this.addressInput, run);
    container.append(this.form, this.output);
    this.form.addEventListener("submit", (e) => {
      e.preventDefault();
      void this.run(this.hostSelect.value, this.addressInput.value.trim());
    });
  }

  setTopology(doc: TopologyDoc): void {
    this.hostSelect.textContent = "";
    for (const device of doc.devices) {
      const option = document.createElement("option");
      option.value = device.hostname;
      option.textContent = device.hostname;
      this.hostSelect.appendChild(option);
    }
  }

  async run(host: string, address: string): Promise<SystemEventMsg | null> {
    if (!isValidIpv4(address)) {
      this.setOutput(`"${address}" is not a valid IPv4 address.`, "invalid");
      return null;
    }
    let event: SystemEventMsg;
    try {
      event = await this.api.postQuery(this.sessionId, `ping ${host} ${address}`);
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.setOutput("Provision a topology first, then ping.", "hint");
        return null;
      }
      this.setOutput(`Query failed: ${String(err)}`, "error");
      return null;
    }
    if (event.success) {
      const path = event.forward_path ?? [];
      highlightPath(this.graphContainer, path);
      this.setOutput(`Reachable via ${path.join(" → ")}.`, "success");
    } else {
      clearHighlight(this.graphContainer);
      const reason = event.failure_reason ?? event.code ?? "unknown";
      this.setOutput(`Unreachable (${reason}).`, "failure");
      this.addBadge(reason);
    }
    return event;
  }

  private setOutput(text: string, kind: string): void {
    this.output.textContent = text;
    this.output.dataset.kind = kind;
  }

  private addBadge(reason: string): void {
    const badge = document.createElement("span");
    badge.className = "failure-badge";
    badge.textContent = reason;
    this.output.appendChild(badge);
  }
}
