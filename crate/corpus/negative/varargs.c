int f(int a, ...) { return a; }
int main() { int r = f(1); }
