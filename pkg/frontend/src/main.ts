// Browser entry point: paste a KB, start a consultation, interact.

import { Client } from "./api.js";
import { App, boot } from "./app.js";

const client = new Client("");
let app: App | null = null;

function wire(): void {
  const root = document.getElementById("app")!;
  const sourceBox = document.getElementById("source") as HTMLTextAreaElement;
  const loadButton = document.getElementById("load")!;

  loadButton.addEventListener("click", async () => {
    root.innerHTML = "<p>loading…</p>";
    try {
      app = await boot(client, sourceBox.value, root);
    } catch (e) {
      root.innerHTML = `<div class="banner">${(e as Error).message}</div>`;
    }
  });

  root.addEventListener("click", (event) => {
    const target = (event.target as HTMLElement).closest("[data-action]");
    if (target && app) {
      const action = (target as HTMLElement).dataset.action;
      if (action !== "assert-select" && action !== "assert-input") {
        app.handle(target as unknown as {
          dataset: Record<string, string>; value?: string;
        });
      }
    }
  });
  root.addEventListener("change", (event) => {
    const target = event.target as HTMLElement;
    if (target.dataset.action && app) {
      app.handle(target as unknown as {
        dataset: Record<string, string>; value?: string;
      });
    }
  });
}

document.addEventListener("DOMContentLoaded", wire);
