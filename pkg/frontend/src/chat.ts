/** Chat panel: scenario entry, transcript rendering, clarification
 * questions highlighted with an inline reply box. */

import { ApiClient } from "./api.js";
import { SystemEventMsg } from "./types.js";

export interface ChatCallbacks {
  onProvisioned?: () => void;
  onEvent?: (event: SystemEventMsg) => void;
}

export class ChatPanel {
  readonly transcript: HTMLElement;
  private pendingReply: HTMLElement | null = null;

  constructor(
    readonly container: HTMLElement,
    readonly api: ApiClient,
    readonly sessionId: string,
    readonly callbacks: ChatCallbacks = {},
  ) {
    this.transcript = document.createElement("div");
    this.transcript.className = "transcript";
    container.appendChild(this.transcript);
  }

  addEntry(role: "user" | "system", text: string, extraClass = ""): HTMLElement {
    const entry = document.createElement("div");
    entry.className = `msg ${role}${extraClass ? " " + extraClass : ""}`;
    entry.textContent = text;
    this.transcript.appendChild(entry);
    this.transcript.scrollTop = this.transcript.scrollHeight;
    return entry;
  }

  /** Send scenario text or a clarification reply (the service routes by
   * session phase) and render the outcome. */
  async send(text: string): Promise<SystemEventMsg> {
    this.addEntry("user", text);
    let event: SystemEventMsg;
    try {
      event = await this.api.postMessage(this.sessionId, text);
    } catch (err) {
      this.showRetryToast(text, err);
      throw err;
    }
    this.renderEvent(event);
    return event;
  }

  renderEvent(event: SystemEventMsg): void {
    if (event.event === "AskClarification") {
      const entry = this.addEntry("system", event.text, "clarification");
      this.attachReplyBox(entry);
    } else if (event.event === "Error") {
      this.addEntry("system", `${event.code ?? "error"}: ${event.text}`, "error");
    } else {
      this.addEntry("system", event.text);
      if (event.event === "ProvisionDone") {
        this.callbacks.onProvisioned?.();
      }
    }
    this.callbacks.onEvent?.(event);
  }

  private attachReplyBox(entry: HTMLElement): void {
    const form = document.createElement("form");
    form.className = "inline-reply";
    const input = document.createElement("input");
    input.type = "text";
    input.placeholder = "Reply with the missing details";
    const button = document.createElement("button");
    button.type = "submit";
    button.textContent = "Answer";
    form.append(input, button);
    form.addEventListener("submit", (e) => {
      e.preventDefault();
      if (!input.value.trim()) return;
      form.remove();
      void this.send(input.value.trim());
    });
    entry.appendChild(form);
    this.pendingReply = form;
    input.focus?.();
  }

  /** Connectivity problems leave the transcript unchanged and offer a
   * retry. */
  private showRetryToast(text: string, err: unknown): void {
    this.transcript.lastElementChild?.remove(); // drop the optimistic user entry
    const toast = document.createElement("div");
    toast.className = "toast";
    toast.textContent = `Could not reach the server (${String(err)}). `;
    const retry = document.createElement("button");
    retry.textContent = "Retry";
    retry.addEventListener("click", () => {
      toast.remove();
      void this.send(text);
    });
    toast.appendChild(retry);
    this.container.appendChild(toast);
  }
}
