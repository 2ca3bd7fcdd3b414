export * from "./api.js";
export * from "./treemap.js";
export * from "./state.js";
export * from "./render.js";
export * from "./dom.js";
