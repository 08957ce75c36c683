import { ApiClient } from './api';
import { App } from './app';

const DEMO_CHART = {
  mark: 'bar',
  encoding: { x: { field: 'Year' }, y: { field: 'Count' }, color: { field: 'Genre' } },
  title: 'Movies released by genre',
};

const DEMO_DATA = [
  [2006, 20, 80],
  [2007, 35, 70],
  [2008, 28, 55],
  [2009, 30, 40],
  [2010, 26, 25],
].flatMap(([year, action, drama]) => [
  { Year: year, Genre: 'Action', Count: action },
  { Year: year, Genre: 'Drama', Count: drama },
]);

function boot(): void {
  const root = document.getElementById('root') ?? document.body;
  const form = document.createElement('div');
  form.className = 'launcher';
  form.innerHTML = `
    <h1>sketchdoc</h1>
    <p>Paste a chart spec and row-oriented data, or start with the demo chart.
       Sketch on the chart to document findings; lasso marks or legend labels,
       or trace a range or a series.</p>
    <textarea id="chart-input" rows="5" spellcheck="false"></textarea>
    <textarea id="data-input" rows="5" spellcheck="false"></textarea>
    <button id="start">Start session</button>
    <button id="demo">Demo chart</button>
  `;
  root.appendChild(form);
  const chartInput = form.querySelector('#chart-input') as HTMLTextAreaElement;
  const dataInput = form.querySelector('#data-input') as HTMLTextAreaElement;
  chartInput.value = JSON.stringify(DEMO_CHART, null, 2);
  dataInput.value = JSON.stringify(DEMO_DATA);

  const launch = async (chart: unknown, data: unknown[]) => {
    const app = new App(root, new ApiClient(''));
    try {
      await app.start(chart, data);
      form.remove();
    } catch (err) {
      alert(`Could not start a session: ${err}`);
      app.element.remove();
    }
  };
  form.querySelector('#start')?.addEventListener('click', () => {
    void launch(JSON.parse(chartInput.value), JSON.parse(dataInput.value));
  });
  form.querySelector('#demo')?.addEventListener('click', () => {
    void launch(DEMO_CHART, DEMO_DATA);
  });
}

boot();
