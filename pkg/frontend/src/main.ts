/**
 * Browser entry point: session setup form, then the live board.
 * All inference happens server-side; this file is wiring only.
 */

import { ApiClient } from "./api.js";
import { renderBoard } from "./dom.js";
import { BoardStore } from "./state.js";

function input(labelText: string, value: string): [HTMLLabelElement, HTMLInputElement] {
  const label = document.createElement("label");
  label.textContent = labelText + " ";
  const field = document.createElement("input");
  field.value = value;
  label.append(field);
  return [label, field];
}

function mountBoard(root: HTMLElement, client: ApiClient, store: BoardStore): void {
  const controls = document.createElement("div");
  controls.className = "controls";

  const [chipLabel, chipField] = input("stage alternative", "");
  const stage = document.createElement("button");
  stage.textContent = "add to pool";
  stage.addEventListener("click", () => {
    try {
      store.addToPool(chipField.value.trim());
      chipField.value = "";
    } catch (error) {
      alert(error instanceof Error ? error.message : String(error));
    }
  });

  const [selLabel, selField] = input("matrix selection (comma separated)", "");
  const apply = document.createElement("button");
  apply.textContent = "refresh matrix";
  apply.addEventListener("click", () => {
    const alts = selField.value.split(",").map((t) => t.trim()).filter(Boolean);
    void store.refreshMatrix(alts).catch((error) => {
      alert(error instanceof Error ? error.message : String(error));
    });
  });

  controls.append(chipLabel, stage, selLabel, apply);

  const host = document.createElement("div");
  const draw = (): void => {
    host.replaceChildren(
      renderBoard(store.getState(), {
        onDrop: (alternative, tier) => void store.dropChip(alternative, tier),
        onDismissBanner: () => store.dismissBanner(),
        onDismissToast: () => store.dismissToast(),
      }),
    );
  };
  store.subscribe(draw);
  draw();

  root.replaceChildren(controls, host);
}

function mountSetup(root: HTMLElement): void {
  const form = document.createElement("form");
  form.className = "setup";
  const [urlLabel, urlField] = input("service URL", "http://127.0.0.1:8000");
  const [nLabel, nField] = input("attributes (n)", "4");
  const [tierLabel, tierField] = input("tiers", "4");
  const [nameLabel, nameField] = input("names (comma separated, optional)", "");
  const start = document.createElement("button");
  start.textContent = "start session";
  form.append(urlLabel, nLabel, tierLabel, nameLabel, start);

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const client = new ApiClient(urlField.value.trim());
    const names = nameField.value.split(",").map((t) => t.trim()).filter(Boolean);
    client
      .createSession(
        Number(nField.value),
        Number(tierField.value),
        names.length > 0 ? names : undefined,
      )
      .then((snapshot) => mountBoard(root, client, new BoardStore(client, snapshot)))
      .catch((error) => {
        alert(error instanceof Error ? error.message : String(error));
      });
  });

  root.replaceChildren(form);
}

const app = document.getElementById("app");
if (app) mountSetup(app);
