import { ApiClient } from "./api";
import { createApp } from "./app";
import "./styles.css";

// Served by the API process itself by default, so same-origin requests
// need no base URL; a host page can still point elsewhere.
const baseUrl =
  (window as { CROSSMODAL_API?: string }).CROSSMODAL_API ?? "";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");

createApp({
  root,
  client: new ApiClient({ baseUrl }),
  storage: window.localStorage,
});
