/* Browser entry point: mount the explorer against a running color service.
 *
 * The service base URL is the one configurable setting, read from the
 * `?service=` query parameter with a localhost default.
 */

import { ExplorerClient, HierarchyInput } from "./api.js";
import { ExplorerApp } from "./dom.js";

const DEMO_HIERARCHY: HierarchyInput = {
  id: "life",
  children: [
    {
      id: "mammals",
      children: [
        { id: "felids", children: [{ id: "cat" }, { id: "lynx" }] },
        { id: "canids", children: [{ id: "dog" }, { id: "wolf" }] },
        { id: "cetaceans" },
      ],
    },
    {
      id: "birds",
      children: [{ id: "raptors" }, { id: "songbirds" }, { id: "waders" }],
    },
    { id: "reptiles", children: [{ id: "snakes" }, { id: "lizards" }] },
    { id: "fish" },
  ],
};

function baseUrl(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("service");
  return (fromQuery ?? "http://127.0.0.1:8000").replace(/\/$/, "");
}

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app mount point");
  const client = new ExplorerClient(baseUrl());
  const app = await ExplorerApp.open(client, root, {
    hierarchy: DEMO_HIERARCHY,
    seed: 7,
  });

  for (const mode of ["difference", "similarity"]) {
    const button = document.createElement("button");
    button.textContent = mode;
    button.addEventListener("click", () => {
      void app.setMode(mode);
    });
    document.body.appendChild(button);
  }
}

void boot().catch((err) => {
  const root = document.getElementById("app");
  if (root) root.textContent = `failed to reach the color service: ${err}`;
});
