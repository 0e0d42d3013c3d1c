import { App } from "./app.js";

const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app container");
}
// Served by `groupwill serve --ui frontend/dist`, so the API shares the origin.
const app = new App(document, root, "");
(window as unknown as { plannerApp: App }).plannerApp = app;
