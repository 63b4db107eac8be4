import { App } from './app.js';

const params = new URLSearchParams(location.search);
const url =
  params.get('server') ?? `ws://${location.hostname || '127.0.0.1'}:8765`;

const root = document.getElementById('app');
if (root) {
  new App(root, url).start();
}
