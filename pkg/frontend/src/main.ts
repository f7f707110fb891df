/** Browser bootstrap: read configuration from query parameters, mount the
 * panel, and wire DOM events to controller actions. */

import { HttpPanelApi } from './api.js';
import { PanelController } from './panel.js';
import { renderPanel } from './render.js';

function required(params: URLSearchParams, key: string): string {
  const value = params.get(key);
  if (!value) {
    throw new Error(`missing ?${key}= query parameter`);
  }
  return value;
}

export function mount(root: HTMLElement): PanelController {
  const params = new URLSearchParams(window.location.search);
  const api = new HttpPanelApi(
    params.get('service') ?? 'http://127.0.0.1:8000',
    required(params, 'student'),
    required(params, 'problem'),
  );
  const codeText = window.sessionStorage.getItem('stylefeed-code') ??
    'def main():\n    pass\n';
  const controller = new PanelController(api, {
    studentId: required(params, 'student'),
    problemId: required(params, 'problem'),
    codeText,
    pollIntervalMs: Number(params.get('poll') ?? 5000),
    onRender: (state) => {
      root.innerHTML = renderPanel(state);
    },
  });
  controller.setTestsPassed(params.get('tests_passed') === 'true');

  root.addEventListener('click', (event) => {
    const target = event.target as HTMLElement;
    if (target.matches('.request-feedback')) {
      void controller.requestFeedback();
    } else if (target.matches('.retry-load')) {
      void controller.refresh();
    } else if (target.matches('.rate-helpful, .rate-unhelpful')) {
      const article = target.closest('.rating') as HTMLElement | null;
      const reportId = article?.dataset.report;
      if (reportId) {
        void controller.rate(reportId, target.matches('.rate-helpful'));
      }
    }
  });

  controller.start();
  return controller;
}

if (typeof document !== 'undefined') {
  const root = document.getElementById('stylefeed-panel');
  if (root) {
    mount(root);
  }
}
