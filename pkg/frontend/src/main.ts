import { ApiClient } from "./api.js";
import { bootApp } from "./app.js";

declare global {
  interface Window {
    AVIANWARN_API_BASE?: string;
  }
}

const root = document.getElementById("app");
if (root) {
  void bootApp(root, new ApiClient(window.AVIANWARN_API_BASE ?? "/api"));
}
