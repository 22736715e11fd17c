import { ApiClient } from "./api.js";
import { mount } from "./app.js";

const api = new ApiClient("");
const app = mount(document, api);
void app.start("weighted");
